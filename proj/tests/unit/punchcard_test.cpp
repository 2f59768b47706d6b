#include <gtest/gtest.h>

#include <set>

#include "punchcard/group/toy.hpp"
#include "punchcard/punchcard.hpp"
#include "punchcard/scheme.hpp"
#include "toy_oracle.hpp"

namespace punchcard {
namespace {

using T = toy::ToyGroup;
using toy::ToyScalar;
namespace orc = testing::oracle;

TEST(PunchcardToy, ServerPunchExponentiates) {
    // sk = 7 on p = g^3 gives g^21.
    auto rng = Rng::seeded(1);
    const auto keys = ServerKeys<T>::from_secret(ToyScalar(7));
    const auto p = T::exp(T::generator(), ToyScalar(3));
    const auto resp = server_punch<T>(keys, p, rng);
    EXPECT_EQ(resp.punched.residue(), orc::element(4, 21));
    EXPECT_EQ(keys.pk.residue(), orc::element(4, 7));
    EXPECT_TRUE(verify_punch<T>(keys.pk, p, resp));
}

TEST(PunchcardToy, IssueRedeemRoundTripAgainstOracle) {
    auto rng = Rng::seeded(2);
    const auto keys = ServerKeys<T>::from_secret(ToyScalar(10));
    auto [secret, card] = issue<T>(rng);
    const auto h = orc::hash_exponent(tags::kHashMain, secret.u);
    EXPECT_EQ(card.p.residue(), orc::element(4, orc::mulq(h, secret.m.value())));
    for (int k = 0; k < 4; ++k)
        std::tie(secret, card) = client_punch<T>(keys.pk, secret, card, server_punch<T>(keys, card.p, rng), rng);
    const auto req = client_redeem<T>(secret, card);
    EXPECT_EQ(req.p.residue(), orc::element(4, orc::mulq(h, 10000)));
    auto db = RedeemDb::in_memory();
    EXPECT_EQ(server_verify<T>(keys, db, req, 3), VerifyOutcome::BadCard);
    EXPECT_EQ(server_verify<T>(keys, db, req, 4), VerifyOutcome::Accepted);
    EXPECT_EQ(server_verify<T>(keys, db, req, 4), VerifyOutcome::DoubleSpend);
}

class PunchcardMain : public ::testing::Test {
protected:
    using G = MainGroup;
    Rng rng = Rng::system();
    ServerKeys<G> keys = ServerKeys<G>::generate(rng);
    RedeemDb db = RedeemDb::in_memory();

    std::pair<CardSecret<G>, PunchCard<G>> punched(std::uint32_t n) {
        auto [s, c] = issue<G>(rng);
        for (std::uint32_t i = 0; i < n; ++i)
            std::tie(s, c) = client_punch<G>(keys.pk, s, c, server_punch<G>(keys, c.p, rng), rng);
        return {s, c};
    }
};

TEST_F(PunchcardMain, ZeroAndManyPunches) {
    for (std::uint32_t n : {0u, 1u, 10u, 50u}) {
        auto [s, c] = punched(n);
        EXPECT_EQ(server_verify<G>(keys, db, client_redeem<G>(s, c), n), VerifyOutcome::Accepted) << n;
    }
}

TEST_F(PunchcardMain, WrongCountAndForeignKeyRejected) {
    auto [s, c] = punched(5);
    const auto req = client_redeem<G>(s, c);
    EXPECT_EQ(server_verify<G>(keys, db, req, 4), VerifyOutcome::BadCard);
    EXPECT_EQ(server_verify<G>(keys, db, req, 6), VerifyOutcome::BadCard);
    auto other = ServerKeys<G>::generate(rng);
    EXPECT_EQ(server_verify<G>(other, db, req, 5), VerifyOutcome::BadCard);
    EXPECT_FALSE(db.contains(req.u));
}

TEST_F(PunchcardMain, MaskedCardsLookFresh) {
    // Every value the server sees for one card is distinct.
    auto [s, c] = issue<G>(rng);
    std::set<std::array<std::uint8_t, 32>> seen;
    for (int i = 0; i < 20; ++i) {
        seen.insert(G::encode(c.p));
        std::tie(s, c) = client_punch<G>(keys.pk, s, c, server_punch<G>(keys, c.p, rng), rng);
    }
    EXPECT_EQ(seen.size(), 20u);
}

TEST_F(PunchcardMain, ClientPunchLeavesInputsOnFailure) {
    auto [s, c] = issue<G>(rng);
    auto resp = server_punch<G>(keys, c.p, rng);
    resp.punched = G::mul(resp.punched, G::generator());
    const auto s_before = s;
    EXPECT_THROW(client_punch<G>(keys.pk, s, c, resp, rng), ProofRejected);
    EXPECT_EQ(s, s_before);
}

TEST_F(PunchcardMain, MessageSizes) {
    auto [s, c] = punched(1);
    EXPECT_EQ(c.serialize().size(), 32u);
    EXPECT_EQ(server_punch<G>(keys, c.p, rng).serialize().size(), 128u);
    EXPECT_EQ(client_redeem<G>(s, c).serialize().size(), 64u);
    EXPECT_EQ(keys.public_key_bytes().size(), 32u);
}

TEST_F(PunchcardMain, SerializationRoundTrips) {
    auto [s, c] = punched(3);
    const CardState<G> st{s, c, 3};
    const auto back = CardState<G>::deserialize(st.serialize());
    EXPECT_EQ(back.secret, s);
    EXPECT_EQ(back.card, c);
    EXPECT_EQ(back.punches, 3u);
    const auto req = client_redeem<G>(s, c);
    EXPECT_EQ(RedeemRequest<G>::deserialize(req.serialize()).p, req.p);
    EXPECT_THROW(RedeemRequest<G>::deserialize(Bytes(63, 0)), InvalidEncoding);
    auto zero_mask = st.serialize();
    std::fill(zero_mask.begin() + 32, zero_mask.begin() + 64, 0);
    EXPECT_THROW(CardState<G>::deserialize(zero_mask), InvalidEncoding);
}

TEST_F(PunchcardMain, PowerCacheAgreesWithDirectPower) {
    PunchServer<G> server(keys);
    for (std::uint64_t n : {1u, 2u, 10u, 10u, 17u}) EXPECT_EQ(server.cache().get(n), pow_int(keys.sk, n));
    EXPECT_EQ(server.cache().cached(), 4u);
    auto [s, c] = punched(10);
    EXPECT_EQ(server.verify(db, client_redeem<G>(s, c), 10), VerifyOutcome::Accepted);
}

}  // namespace
}  // namespace punchcard
