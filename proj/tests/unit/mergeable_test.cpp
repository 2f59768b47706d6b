#include <gtest/gtest.h>

#include "punchcard/group/toy.hpp"
#include "punchcard/mergeable.hpp"
#include "punchcard/scheme.hpp"
#include "toy_oracle.hpp"

namespace punchcard {
namespace {

using P = toy::ToyPairing;
using toy::ToyScalar;
namespace orc = testing::oracle;

TEST(MergeableToy, ServerPunchesBothHalves) {
    // sk = 5 on (g0^2, g1^3) gives (g0^10, g1^15).
    auto rng = Rng::seeded(1);
    const auto keys = MergeServerKeys<P>::from_secret(ToyScalar(5));
    const MergeCard<P> card{P::G0::exp(P::G0::generator(), ToyScalar(2)), P::G1::exp(P::G1::generator(), ToyScalar(3))};
    const auto resp = merge_server_punch<P>(keys, card, rng);
    EXPECT_EQ(resp.punched0.residue(), orc::element(orc::kG0, 10));
    EXPECT_EQ(resp.punched1.residue(), orc::element(orc::kG1, 15));
    EXPECT_TRUE(merge_verify_punch<P>(MergePublicKey<P>::of(keys), card, resp));
}

TEST(MergeableToy, MergedValueMatchesOracle) {
    auto rng = Rng::seeded(2);
    const auto keys = MergeServerKeys<P>::from_secret(ToyScalar(3));
    const auto pk = MergePublicKey<P>::of(keys);
    auto [sa, ca] = merge_issue<P>(rng);
    auto [sb, cb] = merge_issue<P>(rng);
    for (int i = 0; i < 2; ++i) std::tie(sa, ca) = merge_client_punch<P>(pk, sa, ca, merge_server_punch<P>(keys, ca, rng), rng);
    for (int i = 0; i < 3; ++i) std::tie(sb, cb) = merge_client_punch<P>(pk, sb, cb, merge_server_punch<P>(keys, cb, rng), rng);
    const auto req = client_merge_redeem<P>(sa, ca, sb, cb);
    const auto h0 = orc::hash_exponent(tags::kHashMergeG0, sa.u);
    const auto h1 = orc::hash_exponent(tags::kHashMergeG1, sb.u);
    EXPECT_EQ(req.merged.residue(), orc::element(orc::kGT, orc::mulq(orc::mulq(h0, h1), 243)));  // 3^5
    auto db = RedeemDb::in_memory();
    EXPECT_EQ(merge_server_verify<P>(keys, db, req, 4), VerifyOutcome::BadCard);
    EXPECT_EQ(merge_server_verify<P>(keys, db, req, 5), VerifyOutcome::Accepted);
    EXPECT_EQ(merge_server_verify<P>(keys, db, req, 5), VerifyOutcome::DoubleSpend);
}

class MergeableBls : public ::testing::Test {
protected:
    using G = MergeGroups;
    Rng rng = Rng::system();
    MergeServerKeys<G> keys = MergeServerKeys<G>::generate(rng);
    MergePublicKey<G> pk = MergePublicKey<G>::of(keys);
    RedeemDb db = RedeemDb::in_memory();

    std::pair<MergeCardSecret<G>, MergeCard<G>> punched(int n) {
        auto [s, c] = merge_issue<G>(rng);
        for (int i = 0; i < n; ++i) std::tie(s, c) = merge_client_punch<G>(pk, s, c, merge_server_punch<G>(keys, c, rng), rng);
        return {s, c};
    }
};

TEST_F(MergeableBls, SplitsOfTen) {
    for (int i : {0, 3, 10}) {
        auto [sa, ca] = punched(i);
        auto [sb, cb] = punched(10 - i);
        EXPECT_EQ(merge_server_verify<G>(keys, db, client_merge_redeem<G>(sa, ca, sb, cb), 10), VerifyOutcome::Accepted)
            << i;
    }
}

TEST_F(MergeableBls, SameCardTwiceAndPartialDoubleSpend) {
    auto [sa, ca] = punched(2);
    auto [sb, cb] = punched(2);
    auto [sc, cc] = punched(2);
    EXPECT_EQ(merge_server_verify<G>(keys, db, client_merge_redeem<G>(sa, ca, sa, ca), 4), VerifyOutcome::BadCard);
    EXPECT_EQ(merge_server_verify<G>(keys, db, client_merge_redeem<G>(sa, ca, sb, cb), 4), VerifyOutcome::Accepted);
    // B is spent; C must not be consumed by the failed attempt.
    EXPECT_EQ(merge_server_verify<G>(keys, db, client_merge_redeem<G>(sc, cc, sb, cb), 4), VerifyOutcome::DoubleSpend);
    EXPECT_FALSE(db.contains(sc.u));
}

TEST_F(MergeableBls, SizesMatchTheProtocol) {
    auto [s, c] = punched(1);
    EXPECT_EQ(keys.public_key_bytes().size(), 144u);
    EXPECT_EQ(c.serialize().size(), 144u);
    EXPECT_EQ(merge_server_punch<G>(keys, c, rng).serialize().size(), 496u);
    EXPECT_EQ(client_merge_redeem<G>(s, c, s, c).serialize().size(), 640u);
}

TEST_F(MergeableBls, OneBadProofRejectsTheWholePunch) {
    auto [s, c] = punched(0);
    auto resp = merge_server_punch<G>(keys, c, rng);
    resp.punched1 = G::G1::mul(resp.punched1, G::G1::generator());
    EXPECT_THROW(merge_client_punch<G>(pk, s, c, resp, rng), ProofRejected);
    const auto good = merge_server_punch<G>(keys, c, rng);
    const auto back = MergePunchResponse<G>::deserialize(good.serialize());
    EXPECT_NO_THROW(merge_client_punch<G>(pk, s, c, back, rng));
}

}  // namespace
}  // namespace punchcard
