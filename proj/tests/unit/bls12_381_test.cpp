#include <gtest/gtest.h>

#include "punchcard/bytes.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/group/bls12_381.hpp"

namespace punchcard {
namespace {

using B = Bls12381;
using Fr = Fr381;

// Compressed generators as fixed by the BLS12-381 curve definition.
constexpr const char* kG1Gen =
    "97f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac586c55e83ff97a1aeffb3af00adb22c6bb";
constexpr const char* kG2Gen =
    "93e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f5049334cf11213945d57e5ac7d055d042b7e"
    "024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3d1770bac0326a805bbefd48056c8c121bdb8";

TEST(Bls12381, GeneratorEncodings) {
    EXPECT_EQ(to_hex(B::G0::encode(B::G0::generator())), kG1Gen);
    EXPECT_EQ(to_hex(B::G1::encode(B::G1::generator())), kG2Gen);
    EXPECT_EQ(B::G0::decode(from_hex(kG1Gen)), B::G0::generator());
    EXPECT_EQ(B::G1::decode(from_hex(kG2Gen)), B::G1::generator());
}

TEST(Bls12381, ElementSizes) {
    EXPECT_EQ(B::G0::kElementBytes, 48u);
    EXPECT_EQ(B::G1::kElementBytes, 96u);
    EXPECT_EQ(B::GT::kElementBytes, 576u);
}

TEST(Bls12381, Bilinearity) {
    auto rng = Rng::seeded(5);
    for (int i = 0; i < 3; ++i) {
        const auto a = Fr::random(rng), b = Fr::random(rng);
        const auto lhs = B::pair(B::G0::exp(B::G0::generator(), a), B::G1::exp(B::G1::generator(), b));
        EXPECT_EQ(lhs, B::GT::exp(B::GT::generator(), a * b));
        EXPECT_EQ(lhs, B::GT::exp(B::pair(B::G0::generator(), B::G1::generator()), a * b));
    }
    EXPECT_FALSE(B::GT::is_identity(B::GT::generator()));
}

TEST(Bls12381, PairingOfHashedPointsSwapsExponents) {
    // The identity the mergeable scheme relies on: e(x^(i+j), y) == e(x^i, y^j).
    auto rng = Rng::seeded(6);
    const auto x = B::G0::hash_to_group("t0", rng.bytes<32>());
    const auto y = B::G1::hash_to_group("t1", rng.bytes<32>());
    const auto sk = Fr::random(rng);
    EXPECT_EQ(B::pair(B::G0::exp(x, pow_int(sk, 7)), y),
              B::pair(B::G0::exp(x, pow_int(sk, 3)), B::G1::exp(y, pow_int(sk, 4))));
}

TEST(Bls12381, RoundTripsAndRejects) {
    auto rng = Rng::seeded(7);
    const auto s = Fr::random(rng);
    const auto p0 = B::G0::exp(B::G0::generator(), s);
    const auto p1 = B::G1::exp(B::G1::generator(), s);
    const auto t = B::GT::exp(B::GT::generator(), s);
    EXPECT_EQ(B::G0::decode(B::G0::encode(p0)), p0);
    EXPECT_EQ(B::G1::decode(B::G1::encode(p1)), p1);
    EXPECT_EQ(B::GT::decode(B::GT::encode(t)), t);
    EXPECT_EQ(Fr::from_bytes(s.to_bytes()), s);

    auto bad = B::G0::encode(p0);
    bad[47] ^= 1;  // almost certainly off the curve or out of the subgroup
    EXPECT_THROW(B::G0::decode(bad), InvalidEncoding);
    EXPECT_THROW(B::G0::decode(Bytes(47, 0)), InvalidEncoding);
    auto gt_bad = B::GT::encode(t);
    gt_bad[0] ^= 1;
    EXPECT_THROW(B::GT::decode(gt_bad), InvalidEncoding);
}

TEST(Bls12381, ScalarArithmetic) {
    auto rng = Rng::seeded(8);
    const auto a = random_nonzero<Fr>(rng);
    EXPECT_EQ(a * a.inverse(), Fr::one());
    EXPECT_EQ(pow_int(Fr::from_u64(2), 10), Fr::from_u64(1024));
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_THROW(Fr::zero().inverse(), ZeroInverse);
}

TEST(Bls12381, HashToGroupSeparatesTags) {
    const Bytes in{9, 9};
    EXPECT_EQ(B::G0::hash_to_group("a", in), B::G0::hash_to_group("a", in));
    EXPECT_NE(B::G0::hash_to_group("a", in), B::G0::hash_to_group("b", in));
    EXPECT_NE(B::G1::hash_to_group("a", in), B::G1::hash_to_group("b", in));
}

}  // namespace
}  // namespace punchcard
