#pragma once

// Small Schnorr subgroups with brute-forceable discrete logs. These exist so
// the generic protocol code can be checked against plain modular arithmetic;
// they offer no security whatsoever.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "punchcard/errors.hpp"
#include "punchcard/group/group.hpp"
#include "punchcard/hash.hpp"

namespace punchcard::toy {

/// Safe prime P = 2q + 1; the quadratic residues form the subgroup of order q.
inline constexpr std::uint32_t kModulus = 2039;
inline constexpr std::uint32_t kOrder = 1019;

constexpr std::uint32_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t result = 1 % mod;
    base %= mod;
    while (exp != 0) {
        if (exp & 1U) result = result * base % mod;
        base = base * base % mod;
        exp >>= 1U;
    }
    return static_cast<std::uint32_t>(result);
}

/// Reduces a big-endian byte string modulo `mod`.
inline std::uint32_t reduce_be(std::span<const std::uint8_t> bytes, std::uint32_t mod) {
    std::uint64_t acc = 0;
    for (auto b : bytes) acc = (acc * 256 + b) % mod;
    return static_cast<std::uint32_t>(acc);
}

class ToyScalar {
public:
    static constexpr std::size_t kBytes = 2;

    ToyScalar() = default;
    explicit ToyScalar(std::uint64_t v) : v_(static_cast<std::uint32_t>(v % kOrder)) {}

    static ToyScalar zero() { return {}; }
    static ToyScalar one() { return ToyScalar(1); }
    static ToyScalar from_u64(std::uint64_t v) { return ToyScalar(v); }
    static ToyScalar random(Rng& rng) { return ToyScalar(rng.uniform(kOrder)); }
    static ToyScalar from_wide(std::span<const std::uint8_t, 64> wide) {
        return ToyScalar(reduce_be(wide, kOrder));
    }
    static ToyScalar from_bytes(std::span<const std::uint8_t> bytes) {
        if (bytes.size() != kBytes) throw InvalidEncoding("toy scalar: wrong length");
        std::uint32_t v = (static_cast<std::uint32_t>(bytes[0]) << 8) | bytes[1];
        if (v >= kOrder) throw InvalidEncoding("toy scalar: not reduced");
        return ToyScalar(v);
    }

    std::array<std::uint8_t, kBytes> to_bytes() const {
        return {static_cast<std::uint8_t>(v_ >> 8), static_cast<std::uint8_t>(v_)};
    }
    std::uint32_t value() const { return v_; }
    bool is_zero() const { return v_ == 0; }
    ToyScalar inverse() const {
        if (v_ == 0) throw ZeroInverse();
        return ToyScalar(pow_mod(v_, kOrder - 2, kOrder));
    }

    friend ToyScalar operator+(const ToyScalar& a, const ToyScalar& b) {
        return ToyScalar(std::uint64_t{a.v_} + b.v_);
    }
    friend ToyScalar operator-(const ToyScalar& a, const ToyScalar& b) {
        return ToyScalar(std::uint64_t{a.v_} + kOrder - b.v_);
    }
    friend ToyScalar operator*(const ToyScalar& a, const ToyScalar& b) {
        return ToyScalar(std::uint64_t{a.v_} * b.v_);
    }
    friend ToyScalar operator-(const ToyScalar& a) { return ToyScalar(kOrder - a.v_); }
    friend bool operator==(const ToyScalar&, const ToyScalar&) = default;

private:
    std::uint32_t v_ = 0;
};

template <class Tag>
class ToyElement {
public:
    ToyElement() = default;  // identity
    std::uint32_t residue() const { return r_; }
    friend bool operator==(const ToyElement&, const ToyElement&) = default;

private:
    template <std::uint32_t, class>
    friend struct SchnorrGroup;
    explicit ToyElement(std::uint32_t r) : r_(r) {}
    std::uint32_t r_ = 1;
};

/// Order-q subgroup of Z_P^* with a fixed generator. Tag keeps the three
/// groups of the toy pairing type-distinct.
template <std::uint32_t Generator, class Tag>
struct SchnorrGroup {
    static_assert(pow_mod(Generator, kOrder, kModulus) == 1 && Generator != 1,
                  "generator must have order q");

    using Scalar = ToyScalar;
    using Element = ToyElement<Tag>;
    static constexpr std::size_t kElementBytes = 2;

    static std::string_view name() { return Tag::kName; }
    static Element generator() { return Element(Generator); }
    static Element identity() { return Element(1); }
    static bool is_identity(const Element& e) { return e.r_ == 1; }
    static Element exp(const Element& base, const Scalar& s) {
        return Element(pow_mod(base.r_, s.value(), kModulus));
    }
    static Element mul(const Element& a, const Element& b) {
        return Element(static_cast<std::uint32_t>(std::uint64_t{a.r_} * b.r_ % kModulus));
    }
    static Element inverse(const Element& a) {
        return Element(pow_mod(a.r_, kModulus - 2, kModulus));
    }
    static std::array<std::uint8_t, kElementBytes> encode(const Element& e) {
        return {static_cast<std::uint8_t>(e.r_ >> 8), static_cast<std::uint8_t>(e.r_)};
    }
    static Element decode(std::span<const std::uint8_t> bytes) {
        if (bytes.size() != kElementBytes) throw InvalidEncoding("toy element: wrong length");
        std::uint32_t r = (static_cast<std::uint32_t>(bytes[0]) << 8) | bytes[1];
        if (r == 0 || r >= kModulus || pow_mod(r, kOrder, kModulus) != 1)
            throw InvalidEncoding("toy element: not in subgroup");
        return Element(r);
    }
    /// g^(SHA-256(tag || input) mod q). Reveals the discrete log by construction.
    static Element hash_to_group(std::string_view tag, std::span<const std::uint8_t> input) {
        Bytes buf(tag.begin(), tag.end());
        buf.insert(buf.end(), input.begin(), input.end());
        auto digest = sha256(buf);
        return exp(generator(), ToyScalar(reduce_be(digest, kOrder)));
    }

    /// Brute-force discrete log with respect to this group's generator.
    static ToyScalar dlog(const Element& e) {
        static const std::vector<std::uint32_t> table = [] {
            std::vector<std::uint32_t> t(kModulus, 0);
            std::uint64_t acc = 1;
            for (std::uint32_t i = 0; i < kOrder; ++i) {
                t[acc] = i;
                acc = acc * Generator % kModulus;
            }
            return t;
        }();
        return ToyScalar(table[e.r_]);
    }
};

struct MainTag {
    static constexpr std::string_view kName = "toy-schnorr";
};
struct G0Tag {
    static constexpr std::string_view kName = "toy-g0";
};
struct G1Tag {
    static constexpr std::string_view kName = "toy-g1";
};
struct GtTag {
    static constexpr std::string_view kName = "toy-gt";
};

using ToyGroup = SchnorrGroup<4, MainTag>;

/// Dual toy group with e(g0^a, g1^b) := gT^(ab), evaluated through known dlogs.
struct ToyPairing {
    using Scalar = ToyScalar;
    using G0 = SchnorrGroup<4, G0Tag>;
    using G1 = SchnorrGroup<9, G1Tag>;
    using GT = SchnorrGroup<16, GtTag>;

    static GT::Element pair(const G0::Element& a, const G1::Element& b) {
        return GT::exp(GT::generator(), G0::dlog(a) * G1::dlog(b));
    }
};

static_assert(HashableGroup<ToyGroup>);
static_assert(PairingGroups<ToyPairing>);

}  // namespace punchcard::toy
