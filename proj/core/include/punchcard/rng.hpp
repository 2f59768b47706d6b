#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace punchcard {

/// Randomness source. `system()` draws from the OS CSPRNG; `seeded()` is a
/// ChaCha20 keystream for reproducible tests. Not thread-safe: give every
/// thread its own instance.
class Rng {
public:
    static Rng system();
    static Rng seeded(std::uint64_t seed);
    static Rng seeded(const std::array<std::uint8_t, 32>& key);

    void fill(std::span<std::uint8_t> out);

    template <std::size_t N>
    std::array<std::uint8_t, N> bytes() {
        std::array<std::uint8_t, N> out{};
        fill(out);
        return out;
    }

    std::uint64_t next_u64();
    /// Uniform in [0, bound).
    std::uint64_t uniform(std::uint64_t bound);

    bool deterministic() const { return deterministic_; }

private:
    Rng() = default;

    bool deterministic_ = false;
    std::array<std::uint8_t, 32> key_{};
    std::uint64_t nonce_ = 0;
};

}  // namespace punchcard
