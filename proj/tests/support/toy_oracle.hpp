#pragma once

// Plain modular arithmetic for checking protocol states over the toy groups.
// Shares no code with the library: its own SHA-256 (OpenSSL) and its own
// exponentiation.

#include <cstdint>
#include <string_view>

#include "punchcard/bytes.hpp"

namespace punchcard::testing::oracle {

inline constexpr std::uint64_t kP = 2039;
inline constexpr std::uint64_t kQ = 1019;
inline constexpr std::uint64_t kGMain = 4;
inline constexpr std::uint64_t kG0 = 4;
inline constexpr std::uint64_t kG1 = 9;
inline constexpr std::uint64_t kGT = 16;

std::uint64_t powm(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);
inline std::uint64_t mulq(std::uint64_t a, std::uint64_t b) { return (a % kQ) * (b % kQ) % kQ; }
inline std::uint64_t invq(std::uint64_t a) { return powm(a, kQ - 2, kQ); }

/// Exponent h with H(tag, input) = g^h for the toy hash-to-group.
std::uint64_t hash_exponent(std::string_view tag, ByteView input);

/// g^e mod P.
inline std::uint64_t element(std::uint64_t g, std::uint64_t e) { return powm(g, e % kQ, kP); }

}  // namespace punchcard::testing::oracle
