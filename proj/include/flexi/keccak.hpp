#pragma once

#include "flexi/word.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace flexi {

/// Keccak-256 with the original Keccak padding (0x01 domain byte), i.e. the
/// variant Ethereum calls keccak256. Not SHA3-256.
Word256 keccak256(std::span<const std::uint8_t> data);

Word256 keccak256(const std::string& data);

/// keccak256 of the 32-byte big-endian image of a word.
Word256 keccak256_word(const Word256& w);

/// keccak256 of the 64-byte concatenation a || b.
Word256 keccak256_words(const Word256& a, const Word256& b);

} // namespace flexi
