#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include <blst.h>

#include "punchcard/group/group.hpp"

namespace punchcard {

/// Element of the BLS12-381 scalar field F_r, in blst's Montgomery form.
/// Serialized as 32 bytes little-endian.
class Fr381 {
public:
    static constexpr std::size_t kBytes = 32;

    Fr381() = default;

    static Fr381 zero() { return {}; }
    static Fr381 one() { return from_u64(1); }
    static Fr381 from_u64(std::uint64_t v);
    static Fr381 random(Rng& rng);
    static Fr381 from_wide(std::span<const std::uint8_t, 64> wide);
    static Fr381 from_bytes(std::span<const std::uint8_t> bytes);

    std::array<std::uint8_t, kBytes> to_bytes() const;
    bool is_zero() const;
    Fr381 inverse() const;

    friend Fr381 operator+(const Fr381& a, const Fr381& b);
    friend Fr381 operator-(const Fr381& a, const Fr381& b);
    friend Fr381 operator*(const Fr381& a, const Fr381& b);
    friend Fr381 operator-(const Fr381& a);
    friend bool operator==(const Fr381& a, const Fr381& b);

    /// Little-endian scalar bytes as consumed by blst's point multiplication.
    blst_scalar as_blst_scalar() const;

private:
    static Fr381 from_blst_scalar(const blst_scalar& s);
    blst_fr v_{};
};

class G0Point {
public:
    G0Point() = default;  // point at infinity
    const blst_p1& raw() const { return p_; }
    friend bool operator==(const G0Point& a, const G0Point& b) { return blst_p1_is_equal(&a.p_, &b.p_); }

private:
    friend struct Bls12381;
    explicit G0Point(const blst_p1& p) : p_(p) {}
    blst_p1 p_{};
};

class G1Point {
public:
    G1Point() = default;  // point at infinity
    const blst_p2& raw() const { return p_; }
    friend bool operator==(const G1Point& a, const G1Point& b) { return blst_p2_is_equal(&a.p_, &b.p_); }

private:
    friend struct Bls12381;
    explicit G1Point(const blst_p2& p) : p_(p) {}
    blst_p2 p_{};
};

/// Element of the order-r subgroup of F_p12^*.
class GtElement {
public:
    GtElement() : f_(*blst_fp12_one()) {}
    const blst_fp12& raw() const { return f_; }
    friend bool operator==(const GtElement& a, const GtElement& b) {
        return blst_fp12_is_equal(&a.f_, &b.f_);
    }

private:
    friend struct Bls12381;
    explicit GtElement(const blst_fp12& f) : f_(f) {}
    blst_fp12 f_{};
};

/// BLS12-381 with the optimal ate pairing. The scheme's G0 is the curve group
/// over F_p (48-byte compressed points), G1 the twist group over F_p2
/// (96 bytes), GT the target group (576 bytes: twelve big-endian F_p limbs).
struct Bls12381 {
    using Scalar = Fr381;

    struct G0 {
        using Scalar = Fr381;
        using Element = G0Point;
        static constexpr std::size_t kElementBytes = 48;

        static std::string_view name() { return "bls12-381-g1"; }
        static Element generator();
        static Element identity() { return {}; }
        static bool is_identity(const Element& e);
        static Element exp(const Element& base, const Scalar& s);
        static Element mul(const Element& a, const Element& b);
        static std::array<std::uint8_t, kElementBytes> encode(const Element& e);
        static Element decode(std::span<const std::uint8_t> bytes);
        static Element hash_to_group(std::string_view tag, std::span<const std::uint8_t> input);
    };

    struct G1 {
        using Scalar = Fr381;
        using Element = G1Point;
        static constexpr std::size_t kElementBytes = 96;

        static std::string_view name() { return "bls12-381-g2"; }
        static Element generator();
        static Element identity() { return {}; }
        static bool is_identity(const Element& e);
        static Element exp(const Element& base, const Scalar& s);
        static Element mul(const Element& a, const Element& b);
        static std::array<std::uint8_t, kElementBytes> encode(const Element& e);
        static Element decode(std::span<const std::uint8_t> bytes);
        static Element hash_to_group(std::string_view tag, std::span<const std::uint8_t> input);
    };

    struct GT {
        using Scalar = Fr381;
        using Element = GtElement;
        static constexpr std::size_t kElementBytes = 576;

        static std::string_view name() { return "bls12-381-gt"; }
        /// e(g0, g1).
        static Element generator();
        static Element identity() { return {}; }
        static bool is_identity(const Element& e);
        static Element exp(const Element& base, const Scalar& s);
        static Element mul(const Element& a, const Element& b);
        static std::array<std::uint8_t, kElementBytes> encode(const Element& e);
        /// Rejects non-canonical limbs and anything outside the order-r subgroup.
        static Element decode(std::span<const std::uint8_t> bytes);
    };

    static GT::Element pair(const G0::Element& a, const G1::Element& b);
};

static_assert(PairingGroups<Bls12381>);

}  // namespace punchcard
