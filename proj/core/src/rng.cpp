#include "punchcard/rng.hpp"

#include <sodium.h>

#include "punchcard/hash.hpp"

namespace punchcard {

Rng Rng::system() {
    ensure_sodium();
    return Rng{};
}

Rng Rng::seeded(std::uint64_t seed) {
    std::array<std::uint8_t, 32> key{};
    for (int i = 0; i < 8; ++i) key[i] = static_cast<std::uint8_t>(seed >> (8 * i));
    return seeded(key);
}

Rng Rng::seeded(const std::array<std::uint8_t, 32>& key) {
    ensure_sodium();
    Rng rng;
    rng.deterministic_ = true;
    rng.key_ = key;
    return rng;
}

void Rng::fill(std::span<std::uint8_t> out) {
    if (out.empty()) return;
    if (!deterministic_) {
        randombytes_buf(out.data(), out.size());
        return;
    }
    // One fresh nonce per call: the keystream never repeats for a given key.
    std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
    for (std::size_t i = 0; i < nonce.size(); ++i) nonce[i] = static_cast<std::uint8_t>(nonce_ >> (8 * i));
    ++nonce_;
    crypto_stream_chacha20(out.data(), out.size(), nonce.data(), key_.data());
}

std::uint64_t Rng::next_u64() {
    auto b = bytes<8>();
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
    if (bound <= 1) return 0;
    // Rejection sampling over the largest multiple of bound.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    for (;;) {
        std::uint64_t v = next_u64();
        if (v < limit) return v % bound;
    }
}

}  // namespace punchcard
