#include <gtest/gtest.h>

#include "punchcard/bytes.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/group/ristretto255.hpp"

namespace punchcard {
namespace {

using R = Ristretto255;
using S = RistrettoScalar;

// Multiples of the base point from the ristretto255 test vectors (RFC 9496, A.1).
const char* const kMultiples[] = {
    "0000000000000000000000000000000000000000000000000000000000000000",
    "e2f2ae0a6abc4e71a884a961c500515f58e30b6aa582dd8db6a65945e08d2d76",
    "6a493210f7499cd17fecb510ae0cea23a110e8d5b901f8acadd3095c73a3b919",
    "94741f5d5d52755ece4f23f044ee27d5d1ea1e2bd196b462166b16152a9d0259",
    "da80862773358b466ffadfe0b3293ab3d9fd53c5ea6c955358f568322daf6a57",
};

TEST(Ristretto255, BasePointMultiples) {
    auto acc = R::identity();
    for (std::uint64_t k = 0; k < 5; ++k) {
        EXPECT_EQ(to_hex(R::encode(R::exp(R::generator(), S::from_u64(k)))), kMultiples[k]) << k;
        EXPECT_EQ(to_hex(R::encode(acc)), kMultiples[k]) << k;
        acc = R::mul(acc, R::generator());
    }
}

TEST(Ristretto255, RejectsBadEncodings) {
    // Non-canonical, negative and off-curve encodings from the same vectors.
    for (const char* hex : {"00ffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff",
                            "ffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff7f",
                            "0100000000000000000000000000000000000000000000000000000000000000",
                            "26948d35ca62e643e26a83177332e6b6afeb9d08e4268b650f1f5bbd8d81d371"}) {
        EXPECT_THROW(R::decode(from_hex(hex)), InvalidEncoding) << hex;
    }
    EXPECT_THROW(R::decode(Bytes(31, 0)), InvalidEncoding);
}

TEST(Ristretto255, DecodeRoundTrip) {
    auto rng = Rng::seeded(1);
    for (int i = 0; i < 20; ++i) {
        const auto p = R::exp(R::generator(), S::random(rng));
        EXPECT_EQ(R::decode(R::encode(p)), p);
    }
}

TEST(Ristretto255, ScalarArithmetic) {
    auto rng = Rng::seeded(2);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_nonzero<S>(rng), b = S::random(rng);
        EXPECT_EQ(a * a.inverse(), S::one());
        EXPECT_EQ((a + b) - b, a);
        EXPECT_TRUE((a + (-a)).is_zero());
        EXPECT_EQ(S::from_bytes(a.to_bytes()), a);
        // (g^a)^b == g^(ab)
        EXPECT_EQ(R::exp(R::exp(R::generator(), a), b), R::exp(R::generator(), a * b));
    }
    EXPECT_EQ(pow_int(S::from_u64(3), 4), S::from_u64(81));
    EXPECT_THROW(S::zero().inverse(), ZeroInverse);
}

TEST(Ristretto255, ScalarRejectsUnreduced) {
    // The group order l itself, little-endian.
    EXPECT_THROW(S::from_bytes(from_hex("edd3f55c1a631258d69cf7a2def9de1400000000000000000000000000000010")),
                 InvalidEncoding);
    Bytes all_ff(32, 0xff);
    EXPECT_THROW(S::from_bytes(all_ff), InvalidEncoding);
}

TEST(Ristretto255, HashToGroupIsDeterministicAndSeparated) {
    const Bytes input{1, 2, 3};
    const auto a = R::hash_to_group("tag-a", input);
    EXPECT_EQ(a, R::hash_to_group("tag-a", input));
    EXPECT_NE(a, R::hash_to_group("tag-b", input));
    EXPECT_NE(a, R::hash_to_group("tag-a", Bytes{1, 2, 4}));
    EXPECT_FALSE(R::is_identity(a));
}

TEST(Ristretto255, InverseCancels) {
    auto rng = Rng::seeded(3);
    const auto p = R::hash_to_group("x", rng.bytes<32>());
    EXPECT_TRUE(R::is_identity(R::mul(p, R::inverse(p))));
}

}  // namespace
}  // namespace punchcard
