#include "punchcard/group/bls12_381.hpp"

#include <algorithm>
#include <cstring>

#include "punchcard/errors.hpp"
#include "punchcard/hash.hpp"

namespace punchcard {

namespace {

constexpr std::size_t kScalarBits = 255;

std::string_view dst_of(std::string_view tag) { return tag; }

}  // namespace

// --- F_r ---------------------------------------------------------------------

Fr381 Fr381::from_u64(std::uint64_t v) {
    const std::uint64_t limbs[4] = {v, 0, 0, 0};
    Fr381 r;
    blst_fr_from_uint64(&r.v_, limbs);
    return r;
}

Fr381 Fr381::random(Rng& rng) {
    auto wide = rng.bytes<64>();
    return from_wide(wide);
}

Fr381 Fr381::from_wide(std::span<const std::uint8_t, 64> wide) {
    blst_scalar s;
    blst_scalar_from_le_bytes(&s, wide.data(), wide.size());
    return from_blst_scalar(s);
}

Fr381 Fr381::from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kBytes) throw InvalidEncoding("bls12-381 scalar: expected 32 bytes");
    blst_scalar s;
    blst_scalar_from_lendian(&s, bytes.data());
    if (!blst_scalar_fr_check(&s)) {
        // fr_check rejects zero as well; zero is a valid (if useless) scalar.
        if (std::all_of(bytes.begin(), bytes.end(), [](auto b) { return b == 0; })) return zero();
        throw InvalidEncoding("bls12-381 scalar: not canonically reduced");
    }
    return from_blst_scalar(s);
}

std::array<std::uint8_t, Fr381::kBytes> Fr381::to_bytes() const {
    blst_scalar s = as_blst_scalar();
    std::array<std::uint8_t, kBytes> out{};
    blst_lendian_from_scalar(out.data(), &s);
    return out;
}

blst_scalar Fr381::as_blst_scalar() const {
    blst_scalar s;
    blst_scalar_from_fr(&s, &v_);
    return s;
}

bool Fr381::is_zero() const { return *this == Fr381{}; }

Fr381 Fr381::inverse() const {
    if (is_zero()) throw ZeroInverse();
    Fr381 r;
    blst_fr_eucl_inverse(&r.v_, &v_);
    return r;
}

Fr381 operator+(const Fr381& a, const Fr381& b) {
    Fr381 r;
    blst_fr_add(&r.v_, &a.v_, &b.v_);
    return r;
}

Fr381 operator-(const Fr381& a, const Fr381& b) {
    Fr381 r;
    blst_fr_sub(&r.v_, &a.v_, &b.v_);
    return r;
}

Fr381 operator*(const Fr381& a, const Fr381& b) {
    Fr381 r;
    blst_fr_mul(&r.v_, &a.v_, &b.v_);
    return r;
}

Fr381 operator-(const Fr381& a) {
    Fr381 r;
    blst_fr_cneg(&r.v_, &a.v_, true);
    return r;
}

bool operator==(const Fr381& a, const Fr381& b) { return std::memcmp(&a.v_, &b.v_, sizeof(blst_fr)) == 0; }

Fr381 Fr381::from_blst_scalar(const blst_scalar& s) {
    Fr381 r;
    blst_fr_from_scalar(&r.v_, &s);
    return r;
}

// --- G0 (curve over F_p) -----------------------------------------------------

G0Point Bls12381::G0::generator() { return G0Point(*blst_p1_generator()); }

bool Bls12381::G0::is_identity(const Element& e) { return blst_p1_is_inf(&e.p_); }

G0Point Bls12381::G0::exp(const Element& base, const Scalar& s) {
    blst_scalar k = s.as_blst_scalar();
    blst_p1 out;
    blst_p1_mult(&out, &base.p_, k.b, kScalarBits);
    return G0Point(out);
}

G0Point Bls12381::G0::mul(const Element& a, const Element& b) {
    blst_p1 out;
    blst_p1_add_or_double(&out, &a.p_, &b.p_);
    return G0Point(out);
}

std::array<std::uint8_t, 48> Bls12381::G0::encode(const Element& e) {
    std::array<std::uint8_t, 48> out{};
    blst_p1_compress(out.data(), &e.p_);
    return out;
}

G0Point Bls12381::G0::decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kElementBytes) throw InvalidEncoding("bls12-381 G0: expected 48 bytes");
    blst_p1_affine aff;
    if (blst_p1_uncompress(&aff, bytes.data()) != BLST_SUCCESS)
        throw InvalidEncoding("bls12-381 G0: bad point encoding");
    if (!blst_p1_affine_in_g1(&aff)) throw InvalidEncoding("bls12-381 G0: point not in subgroup");
    blst_p1 p;
    blst_p1_from_affine(&p, &aff);
    G0Point result(p);
    auto canon = encode(result);
    if (!std::equal(canon.begin(), canon.end(), bytes.begin()))
        throw InvalidEncoding("bls12-381 G0: non-canonical encoding");
    return result;
}

G0Point Bls12381::G0::hash_to_group(std::string_view tag, std::span<const std::uint8_t> input) {
    auto dst = dst_of(tag);
    blst_p1 out;
    blst_hash_to_g1(&out, input.data(), input.size(), reinterpret_cast<const byte*>(dst.data()), dst.size(),
                    nullptr, 0);
    return G0Point(out);
}

// --- G1 (twist over F_p2) ----------------------------------------------------

G1Point Bls12381::G1::generator() { return G1Point(*blst_p2_generator()); }

bool Bls12381::G1::is_identity(const Element& e) { return blst_p2_is_inf(&e.p_); }

G1Point Bls12381::G1::exp(const Element& base, const Scalar& s) {
    blst_scalar k = s.as_blst_scalar();
    blst_p2 out;
    blst_p2_mult(&out, &base.p_, k.b, kScalarBits);
    return G1Point(out);
}

G1Point Bls12381::G1::mul(const Element& a, const Element& b) {
    blst_p2 out;
    blst_p2_add_or_double(&out, &a.p_, &b.p_);
    return G1Point(out);
}

std::array<std::uint8_t, 96> Bls12381::G1::encode(const Element& e) {
    std::array<std::uint8_t, 96> out{};
    blst_p2_compress(out.data(), &e.p_);
    return out;
}

G1Point Bls12381::G1::decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kElementBytes) throw InvalidEncoding("bls12-381 G1: expected 96 bytes");
    blst_p2_affine aff;
    if (blst_p2_uncompress(&aff, bytes.data()) != BLST_SUCCESS)
        throw InvalidEncoding("bls12-381 G1: bad point encoding");
    if (!blst_p2_affine_in_g2(&aff)) throw InvalidEncoding("bls12-381 G1: point not in subgroup");
    blst_p2 p;
    blst_p2_from_affine(&p, &aff);
    G1Point result(p);
    auto canon = encode(result);
    if (!std::equal(canon.begin(), canon.end(), bytes.begin()))
        throw InvalidEncoding("bls12-381 G1: non-canonical encoding");
    return result;
}

G1Point Bls12381::G1::hash_to_group(std::string_view tag, std::span<const std::uint8_t> input) {
    auto dst = dst_of(tag);
    blst_p2 out;
    blst_hash_to_g2(&out, input.data(), input.size(), reinterpret_cast<const byte*>(dst.data()), dst.size(),
                    nullptr, 0);
    return G1Point(out);
}

// --- GT ------------------------------------------------------------------------

GtElement Bls12381::GT::generator() {
    static const GtElement gt = pair(G0::generator(), G1::generator());
    return gt;
}

bool Bls12381::GT::is_identity(const Element& e) { return blst_fp12_is_one(&e.f_); }

GtElement Bls12381::GT::exp(const Element& base, const Scalar& s) {
    // Left-to-right square-and-multiply over the canonical scalar bits.
    auto bytes = s.to_bytes();
    blst_fp12 acc = *blst_fp12_one();
    bool started = false;
    for (int i = static_cast<int>(kScalarBits); i >= 0; --i) {
        const bool bit = (bytes[static_cast<std::size_t>(i) / 8] >> (i % 8)) & 1U;
        if (started) blst_fp12_cyclotomic_sqr(&acc, &acc);
        if (bit) {
            blst_fp12_mul(&acc, &acc, &base.f_);
            started = true;
        }
    }
    return GtElement(acc);
}

GtElement Bls12381::GT::mul(const Element& a, const Element& b) {
    blst_fp12 out;
    blst_fp12_mul(&out, &a.f_, &b.f_);
    return GtElement(out);
}

std::array<std::uint8_t, 576> Bls12381::GT::encode(const Element& e) {
    static_assert(sizeof(blst_fp12) == 12 * sizeof(blst_fp));
    std::array<std::uint8_t, 576> out{};
    const blst_fp* limbs = &e.f_.fp6[0].fp2[0].fp[0];
    for (std::size_t i = 0; i < 12; ++i) blst_bendian_from_fp(out.data() + 48 * i, limbs + i);
    return out;
}

GtElement Bls12381::GT::decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kElementBytes) throw InvalidEncoding("bls12-381 GT: expected 576 bytes");
    blst_fp12 f;
    blst_fp* limbs = &f.fp6[0].fp2[0].fp[0];
    for (std::size_t i = 0; i < 12; ++i) {
        blst_fp_from_bendian(limbs + i, bytes.data() + 48 * i);
        std::array<std::uint8_t, 48> canon{};
        blst_bendian_from_fp(canon.data(), limbs + i);
        if (!std::equal(canon.begin(), canon.end(), bytes.begin() + 48 * i))
            throw InvalidEncoding("bls12-381 GT: limb not reduced mod p");
    }
    if (!blst_fp12_in_group(&f)) throw InvalidEncoding("bls12-381 GT: element not in target group");
    return GtElement(f);
}

GtElement Bls12381::pair(const G0::Element& a, const G1::Element& b) {
    if (G0::is_identity(a) || G1::is_identity(b)) return GtElement{};
    blst_p1_affine pa;
    blst_p2_affine qb;
    blst_p1_to_affine(&pa, &a.p_);
    blst_p2_to_affine(&qb, &b.p_);
    blst_fp12 ml;
    blst_miller_loop(&ml, &qb, &pa);
    blst_fp12 out;
    blst_final_exp(&out, &ml);
    return GtElement(out);
}

}  // namespace punchcard
