#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "punchcard/group/group.hpp"

namespace punchcard {

/// Integer modulo the ristretto255 group order l = 2^252 + 27742317777372353535851937790883648493,
/// stored as its canonical 32-byte little-endian encoding.
class RistrettoScalar {
public:
    static constexpr std::size_t kBytes = 32;

    RistrettoScalar() = default;

    static RistrettoScalar zero() { return {}; }
    static RistrettoScalar one() { return from_u64(1); }
    static RistrettoScalar from_u64(std::uint64_t v);
    static RistrettoScalar random(Rng& rng);
    /// Reduces a 64-byte little-endian integer mod l.
    static RistrettoScalar from_wide(std::span<const std::uint8_t, 64> wide);
    /// Rejects anything but a canonical encoding in [0, l).
    static RistrettoScalar from_bytes(std::span<const std::uint8_t> bytes);

    const std::array<std::uint8_t, kBytes>& to_bytes() const { return v_; }
    bool is_zero() const;
    RistrettoScalar inverse() const;

    friend RistrettoScalar operator+(const RistrettoScalar& a, const RistrettoScalar& b);
    friend RistrettoScalar operator-(const RistrettoScalar& a, const RistrettoScalar& b);
    friend RistrettoScalar operator*(const RistrettoScalar& a, const RistrettoScalar& b);
    friend RistrettoScalar operator-(const RistrettoScalar& a);
    friend bool operator==(const RistrettoScalar&, const RistrettoScalar&) = default;

private:
    std::array<std::uint8_t, kBytes> v_{};
};

/// A ristretto255 group element held in canonical encoded form.
class RistrettoPoint {
public:
    RistrettoPoint() = default;  // identity

    const std::array<std::uint8_t, 32>& bytes() const { return enc_; }
    friend bool operator==(const RistrettoPoint&, const RistrettoPoint&) = default;

private:
    friend struct Ristretto255;
    explicit RistrettoPoint(const std::array<std::uint8_t, 32>& enc) : enc_(enc) {}
    std::array<std::uint8_t, 32> enc_{};
};

/// Prime-order group built on Curve25519 (libsodium backend).
struct Ristretto255 {
    using Scalar = RistrettoScalar;
    using Element = RistrettoPoint;
    static constexpr std::size_t kElementBytes = 32;

    static std::string_view name() { return "ristretto255"; }
    static Element generator();
    static Element identity() { return {}; }
    static bool is_identity(const Element& e) { return e == Element{}; }
    static Element exp(const Element& base, const Scalar& s);
    static Element mul(const Element& a, const Element& b);
    static Element inverse(const Element& a);
    static std::array<std::uint8_t, kElementBytes> encode(const Element& e) { return e.enc_; }
    static Element decode(std::span<const std::uint8_t> bytes);
    /// Uniform map of a tagged SHA-512 digest; never returns the identity.
    static Element hash_to_group(std::string_view tag, std::span<const std::uint8_t> input);
};

static_assert(HashableGroup<Ristretto255>);

}  // namespace punchcard
