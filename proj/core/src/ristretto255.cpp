#include "punchcard/group/ristretto255.hpp"

#include <sodium.h>

#include "punchcard/errors.hpp"
#include "punchcard/hash.hpp"

namespace punchcard {

RistrettoScalar RistrettoScalar::from_u64(std::uint64_t v) {
    RistrettoScalar s;
    for (int i = 0; i < 8; ++i) s.v_[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return s;
}

RistrettoScalar RistrettoScalar::random(Rng& rng) {
    auto wide = rng.bytes<64>();
    return from_wide(wide);
}

RistrettoScalar RistrettoScalar::from_wide(std::span<const std::uint8_t, 64> wide) {
    ensure_sodium();
    std::array<std::uint8_t, 64> buf{};
    std::copy(wide.begin(), wide.end(), buf.begin());
    RistrettoScalar s;
    crypto_core_ristretto255_scalar_reduce(s.v_.data(), buf.data());
    return s;
}

RistrettoScalar RistrettoScalar::from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kBytes) throw InvalidEncoding("scalar: expected 32 bytes");
    std::array<std::uint8_t, 64> wide{};
    std::copy(bytes.begin(), bytes.end(), wide.begin());
    RistrettoScalar s = from_wide(wide);
    if (!std::equal(bytes.begin(), bytes.end(), s.v_.begin()))
        throw InvalidEncoding("scalar: not canonically reduced");
    return s;
}

bool RistrettoScalar::is_zero() const { return sodium_is_zero(v_.data(), v_.size()) == 1; }

RistrettoScalar RistrettoScalar::inverse() const {
    RistrettoScalar r;
    if (crypto_core_ristretto255_scalar_invert(r.v_.data(), v_.data()) != 0) throw ZeroInverse();
    return r;
}

RistrettoScalar operator+(const RistrettoScalar& a, const RistrettoScalar& b) {
    RistrettoScalar r;
    crypto_core_ristretto255_scalar_add(r.v_.data(), a.v_.data(), b.v_.data());
    return r;
}

RistrettoScalar operator-(const RistrettoScalar& a, const RistrettoScalar& b) {
    RistrettoScalar r;
    crypto_core_ristretto255_scalar_sub(r.v_.data(), a.v_.data(), b.v_.data());
    return r;
}

RistrettoScalar operator*(const RistrettoScalar& a, const RistrettoScalar& b) {
    RistrettoScalar r;
    crypto_core_ristretto255_scalar_mul(r.v_.data(), a.v_.data(), b.v_.data());
    return r;
}

RistrettoScalar operator-(const RistrettoScalar& a) {
    RistrettoScalar r;
    crypto_core_ristretto255_scalar_negate(r.v_.data(), a.v_.data());
    return r;
}

RistrettoPoint Ristretto255::generator() {
    static const RistrettoPoint g = [] {
        ensure_sodium();
        std::array<std::uint8_t, 32> enc{};
        auto one = RistrettoScalar::one();
        if (crypto_scalarmult_ristretto255_base(enc.data(), one.to_bytes().data()) != 0)
            throw std::logic_error("ristretto255 base point");
        return RistrettoPoint(enc);
    }();
    return g;
}

RistrettoPoint Ristretto255::exp(const Element& base, const Scalar& s) {
    if (s.is_zero() || is_identity(base)) return identity();
    std::array<std::uint8_t, 32> out{};
    int rc = base == generator()
                 ? crypto_scalarmult_ristretto255_base(out.data(), s.to_bytes().data())
                 : crypto_scalarmult_ristretto255(out.data(), s.to_bytes().data(), base.enc_.data());
    // libsodium reports an identity result as failure; in a prime-order group
    // that only happens for a zero exponent or identity base, handled above.
    if (rc != 0) return identity();
    return RistrettoPoint(out);
}

RistrettoPoint Ristretto255::mul(const Element& a, const Element& b) {
    std::array<std::uint8_t, 32> out{};
    if (crypto_core_ristretto255_add(out.data(), a.enc_.data(), b.enc_.data()) != 0)
        throw InvalidEncoding("ristretto255: invalid operand");
    return RistrettoPoint(out);
}

RistrettoPoint Ristretto255::inverse(const Element& a) {
    std::array<std::uint8_t, 32> out{};
    if (crypto_core_ristretto255_sub(out.data(), identity().enc_.data(), a.enc_.data()) != 0)
        throw InvalidEncoding("ristretto255: invalid operand");
    return RistrettoPoint(out);
}

RistrettoPoint Ristretto255::decode(std::span<const std::uint8_t> bytes) {
    ensure_sodium();
    if (bytes.size() != kElementBytes) throw InvalidEncoding("ristretto255: expected 32 bytes");
    std::array<std::uint8_t, 32> enc{};
    std::copy(bytes.begin(), bytes.end(), enc.begin());
    if (crypto_core_ristretto255_is_valid_point(enc.data()) != 1)
        throw InvalidEncoding("ristretto255: non-canonical or off-group encoding");
    return RistrettoPoint(enc);
}

RistrettoPoint Ristretto255::hash_to_group(std::string_view tag, std::span<const std::uint8_t> input) {
    for (std::uint8_t counter = 0;; ++counter) {
        auto digest = TaggedHash(tag).update(counter).update(input).finalize();
        std::array<std::uint8_t, 32> out{};
        crypto_core_ristretto255_from_hash(out.data(), digest.data());
        RistrettoPoint p(out);
        if (!is_identity(p)) return p;
    }
}

}  // namespace punchcard
