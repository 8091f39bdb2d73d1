#include "flexi/word.hpp"

#include <stdexcept>

namespace flexi {

Word256 Word256::from_u64(std::uint64_t v) {
    Word256 w;
    for (int i = 0; i < 8; ++i)
        w.bytes[31 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    return w;
}

static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Word256 Word256::from_hex(const std::string& hex) {
    std::size_t pos = 0;
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) pos = 2;
    std::size_t ndigits = hex.size() - pos;
    if (ndigits == 0 || ndigits > 64)
        throw std::invalid_argument("Word256::from_hex: bad length: " + hex);
    Word256 w;
    // right-align digits
    std::size_t bit = 0; // nibble index from the right
    for (std::size_t i = hex.size(); i-- > pos; ++bit) {
        int d = hex_digit(hex[i]);
        if (d < 0) throw std::invalid_argument("Word256::from_hex: bad digit: " + hex);
        w.bytes[31 - bit / 2] |= static_cast<std::uint8_t>(d << (4 * (bit % 2)));
    }
    return w;
}

bool Word256::is_zero() const {
    for (auto b : bytes)
        if (b) return false;
    return true;
}

std::uint64_t Word256::low_u64() const {
    std::uint64_t v = 0;
    for (int i = 24; i < 32; ++i) v = (v << 8) | bytes[i];
    return v;
}

Word256 Word256::add(const Word256& other) const {
    Word256 out;
    unsigned carry = 0;
    for (int i = 31; i >= 0; --i) {
        unsigned s = static_cast<unsigned>(bytes[i]) + other.bytes[i] + carry;
        out.bytes[i] = static_cast<std::uint8_t>(s);
        carry = s >> 8;
    }
    return out;
}

Word256 Word256::add_u64(std::uint64_t n) const {
    return add(from_u64(n));
}

std::string Word256::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s = "0x";
    s.reserve(66);
    for (auto b : bytes) {
        s += digits[b >> 4];
        s += digits[b & 0xf];
    }
    return s;
}

std::string Word256::to_hex_trimmed() const {
    std::string full = to_hex();
    std::size_t i = 2;
    while (i < full.size() - 1 && full[i] == '0') ++i;
    return "0x" + full.substr(i);
}

} // namespace flexi
