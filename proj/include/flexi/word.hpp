#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>

namespace flexi {

/// A 256-bit storage word / slot address, big-endian byte image.
/// Arithmetic wraps modulo 2^256.
struct Word256 {
    std::array<std::uint8_t, 32> bytes{};

    static Word256 from_u64(std::uint64_t v);
    // Parses "0x"-prefixed or bare hex, up to 64 digits, case-insensitive.
    static Word256 from_hex(const std::string& hex);

    bool is_zero() const;
    std::uint64_t low_u64() const; // low-order 8 bytes (callers ensure fit)

    Word256 add(const Word256& other) const; // mod 2^256
    Word256 add_u64(std::uint64_t n) const;

    std::string to_hex() const;         // "0x" + 64 lowercase digits
    std::string to_hex_trimmed() const; // "0x" + minimal digits ("0x0" for zero)

    auto operator<=>(const Word256&) const = default;
};

} // namespace flexi
