#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "punchcard/rng.hpp"

namespace punchcard {

/// Prime-field scalars (exponents). Implementations: RistrettoScalar,
/// Bls12381::Scalar, ToyScalar.
template <class S>
concept ScalarField = std::regular<S> && requires(const S& a, const S& b, Rng& rng,
                                                 std::span<const std::uint8_t> bytes,
                                                 std::span<const std::uint8_t, 64> wide) {
    { S::kBytes } -> std::convertible_to<std::size_t>;
    { S::zero() } -> std::same_as<S>;
    { S::one() } -> std::same_as<S>;
    { S::from_u64(std::uint64_t{}) } -> std::same_as<S>;
    { S::random(rng) } -> std::same_as<S>;
    { S::from_wide(wide) } -> std::same_as<S>;
    { S::from_bytes(bytes) } -> std::same_as<S>;
    { a.to_bytes() } -> std::convertible_to<std::array<std::uint8_t, S::kBytes>>;
    { a.is_zero() } -> std::same_as<bool>;
    { a.inverse() } -> std::same_as<S>;
    { a + b } -> std::same_as<S>;
    { a - b } -> std::same_as<S>;
    { a * b } -> std::same_as<S>;
    { -a } -> std::same_as<S>;
};

/// A cyclic group of prime order, written multiplicatively.
template <class G>
concept PrimeOrderGroup = ScalarField<typename G::Scalar> && std::regular<typename G::Element> &&
    requires(const typename G::Element& e, const typename G::Scalar& s,
             std::span<const std::uint8_t> bytes) {
    { G::kElementBytes } -> std::convertible_to<std::size_t>;
    { G::name() } -> std::convertible_to<std::string_view>;
    { G::generator() } -> std::same_as<typename G::Element>;
    { G::identity() } -> std::same_as<typename G::Element>;
    { G::is_identity(e) } -> std::same_as<bool>;
    { G::exp(e, s) } -> std::same_as<typename G::Element>;
    { G::mul(e, e) } -> std::same_as<typename G::Element>;
    { G::encode(e) } -> std::same_as<std::array<std::uint8_t, G::kElementBytes>>;
    { G::decode(bytes) } -> std::same_as<typename G::Element>;
};

/// A group with a random-oracle style hash onto it.
template <class G>
concept HashableGroup = PrimeOrderGroup<G> &&
    requires(std::string_view tag, std::span<const std::uint8_t> input) {
    { G::hash_to_group(tag, input) } -> std::same_as<typename G::Element>;
};

/// Asymmetric pairing e: G0 x G1 -> GT over groups of one common prime order.
template <class P>
concept PairingGroups = HashableGroup<typename P::G0> && HashableGroup<typename P::G1> &&
    PrimeOrderGroup<typename P::GT> &&
    std::same_as<typename P::G0::Scalar, typename P::Scalar> &&
    std::same_as<typename P::G1::Scalar, typename P::Scalar> &&
    std::same_as<typename P::GT::Scalar, typename P::Scalar> &&
    requires(const typename P::G0::Element& a, const typename P::G1::Element& b) {
    { P::pair(a, b) } -> std::same_as<typename P::GT::Element>;
};

/// base^n by square-and-multiply; O(log n) multiplications.
template <ScalarField S>
S pow_int(S base, std::uint64_t n) {
    S result = S::one();
    while (n != 0) {
        if (n & 1U) result = result * base;
        n >>= 1U;
        if (n != 0) base = base * base;
    }
    return result;
}

/// Uniform nonzero scalar (resamples on zero); used for masks.
template <ScalarField S>
S random_nonzero(Rng& rng) {
    for (;;) {
        S s = S::random(rng);
        if (!s.is_zero()) return s;
    }
}

template <PrimeOrderGroup G>
typename G::Element decode_element(std::span<const std::uint8_t> bytes) {
    return G::decode(bytes);
}

}  // namespace punchcard
