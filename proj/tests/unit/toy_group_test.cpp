#include <gtest/gtest.h>

#include "punchcard/group/toy.hpp"
#include "toy_oracle.hpp"

namespace punchcard {
namespace {

using toy::ToyGroup;
using toy::ToyPairing;
using toy::ToyScalar;
namespace orc = testing::oracle;

TEST(ToyGroup, ScalarPower) {
    // 7^5 = 16807 = 16 * 1019 + 503
    EXPECT_EQ(pow_int(ToyScalar(7), 5).value(), 503u);
    EXPECT_EQ(pow_int(ToyScalar(7), 5).value(), orc::powm(7, 5, orc::kQ));
}

TEST(ToyGroup, ScalarFieldLaws) {
    for (std::uint64_t a = 1; a < orc::kQ; a += 37) {
        const ToyScalar s(a);
        EXPECT_EQ((s * s.inverse()).value(), 1u);
        EXPECT_EQ(s.inverse().value(), orc::invq(a));
        EXPECT_TRUE((s + (-s)).is_zero());
        EXPECT_EQ((s - ToyScalar(1)).value(), (a + orc::kQ - 1) % orc::kQ);
    }
    EXPECT_THROW(ToyScalar::zero().inverse(), ZeroInverse);
}

TEST(ToyGroup, ExponentiationMatchesOracle) {
    for (std::uint64_t e = 0; e < orc::kQ; e += 13) {
        EXPECT_EQ(ToyGroup::exp(ToyGroup::generator(), ToyScalar(e)).residue(), orc::element(4, e));
        EXPECT_EQ(ToyPairing::G1::exp(ToyPairing::G1::generator(), ToyScalar(e)).residue(), orc::element(9, e));
    }
    EXPECT_EQ(ToyGroup::exp(ToyGroup::generator(), ToyScalar(orc::kQ)).residue(), 1u);
}

TEST(ToyGroup, EncodingRejectsNonResidues) {
    EXPECT_EQ(ToyGroup::decode(ToyGroup::encode(ToyGroup::generator())), ToyGroup::generator());
    const std::uint8_t zero[2] = {0, 0};
    const std::uint8_t too_big[2] = {0x07, 0xf7};  // 2039
    const std::uint8_t non_residue[2] = {0, 7};    // 7 is not a square mod 2039
    EXPECT_THROW(ToyGroup::decode(zero), InvalidEncoding);
    EXPECT_THROW(ToyGroup::decode(too_big), InvalidEncoding);
    EXPECT_THROW(ToyGroup::decode(non_residue), InvalidEncoding);
}

TEST(ToyGroup, HashMatchesOracle) {
    for (int i = 0; i < 50; ++i) {
        const Bytes input{static_cast<std::uint8_t>(i), 0x55};
        const auto h = orc::hash_exponent("tag", input);
        EXPECT_EQ(ToyGroup::hash_to_group("tag", input).residue(), orc::element(4, h));
    }
}

TEST(ToyGroup, DlogInvertsExp) {
    for (std::uint64_t e = 0; e < orc::kQ; e += 7)
        EXPECT_EQ(ToyGroup::dlog(ToyGroup::exp(ToyGroup::generator(), ToyScalar(e))).value(), e);
}

TEST(ToyPairing, Bilinear) {
    for (std::uint64_t a = 1; a < 50; a += 7)
        for (std::uint64_t b = 1; b < 50; b += 5) {
            const auto pa = ToyPairing::G0::exp(ToyPairing::G0::generator(), ToyScalar(a));
            const auto pb = ToyPairing::G1::exp(ToyPairing::G1::generator(), ToyScalar(b));
            EXPECT_EQ(ToyPairing::pair(pa, pb).residue(), orc::element(16, a * b));
        }
}

}  // namespace
}  // namespace punchcard
