#include "flexi/keccak.hpp"

#include <cstring>

namespace flexi {
namespace {

constexpr int kRounds = 24;
constexpr std::size_t kRate = 136; // 1088-bit rate for 256-bit output

constexpr std::uint64_t kRoundConstants[kRounds] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

constexpr int kRotations[25] = {
    0,  1,  62, 28, 27, //
    36, 44, 6,  55, 20, //
    3,  10, 43, 25, 39, //
    41, 45, 15, 21, 8,  //
    18, 2,  61, 56, 14, //
};

inline std::uint64_t rotl(std::uint64_t x, int n) {
    return n == 0 ? x : (x << n) | (x >> (64 - n));
}

// state indexed as lane[x + 5*y]
void keccak_f1600(std::uint64_t* a) {
    std::uint64_t b[25], c[5], d[5];
    for (int round = 0; round < kRounds; ++round) {
        for (int x = 0; x < 5; ++x)
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        for (int x = 0; x < 5; ++x)
            d[x] = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y)
                a[x + 5 * y] ^= d[x];
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y)
                b[y + 5 * ((2 * x + 3 * y) % 5)] = rotl(a[x + 5 * y], kRotations[x + 5 * y]);
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y)
                a[x + 5 * y] = b[x + 5 * y] ^ (~b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);
        a[0] ^= kRoundConstants[round];
    }
}

} // namespace

Word256 keccak256(std::span<const std::uint8_t> data) {
    std::uint64_t state[25] = {};
    std::size_t offset = 0;

    auto absorb = [&](const std::uint8_t* block) {
        for (std::size_t i = 0; i < kRate / 8; ++i) {
            std::uint64_t lane = 0;
            for (int j = 7; j >= 0; --j) lane = (lane << 8) | block[i * 8 + j];
            state[i] ^= lane;
        }
        keccak_f1600(state);
    };

    while (data.size() - offset >= kRate) {
        absorb(data.data() + offset);
        offset += kRate;
    }

    std::uint8_t last[kRate] = {};
    std::size_t rem = data.size() - offset;
    std::memcpy(last, data.data() + offset, rem);
    last[rem] ^= 0x01; // original Keccak domain bit
    last[kRate - 1] ^= 0x80;
    absorb(last);

    Word256 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 8; ++j)
            out.bytes[i * 8 + j] = static_cast<std::uint8_t>(state[i] >> (8 * j));
    return out;
}

Word256 keccak256(const std::string& data) {
    return keccak256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Word256 keccak256_word(const Word256& w) {
    return keccak256(std::span<const std::uint8_t>(w.bytes.data(), 32));
}

Word256 keccak256_words(const Word256& a, const Word256& b) {
    std::uint8_t buf[64];
    std::memcpy(buf, a.bytes.data(), 32);
    std::memcpy(buf + 32, b.bytes.data(), 32);
    return keccak256(std::span<const std::uint8_t>(buf, 64));
}

} // namespace flexi
