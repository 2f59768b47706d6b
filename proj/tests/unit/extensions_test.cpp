#include <gtest/gtest.h>

#include "punchcard/extensions/expiry.hpp"
#include "punchcard/extensions/multi_punch.hpp"
#include "punchcard/extensions/redemption_proof.hpp"
#include "punchcard/extensions/ticket.hpp"
#include "punchcard/group/toy.hpp"
#include "punchcard/scheme.hpp"
#include "temp_dir.hpp"
#include "toy_oracle.hpp"

namespace punchcard {
namespace {

using T = toy::ToyGroup;
using toy::ToyScalar;
using G = MainGroup;
namespace orc = testing::oracle;

TEST(MultiPunch, ToyChainValues) {
    // t = 3 on p = g^2 with sk = 5: g^10, g^50, g^250.
    auto rng = Rng::seeded(1);
    const auto keys = ServerKeys<T>::from_secret(ToyScalar(5));
    const auto p = T::exp(T::generator(), ToyScalar(2));
    const auto resp = server_multi_punch<T>(keys, p, 3, rng);
    ASSERT_EQ(resp.links.size(), 3u);
    EXPECT_EQ(resp.links[0].punched.residue(), orc::element(4, 10));
    EXPECT_EQ(resp.links[1].punched.residue(), orc::element(4, 50));
    EXPECT_EQ(resp.links[2].punched.residue(), orc::element(4, 250));
    EXPECT_TRUE(verify_multi_punch<T>(keys.pk, p, resp, 3));
    EXPECT_FALSE(verify_multi_punch<T>(keys.pk, p, resp, 2));
}

TEST(MultiPunch, EqualsSinglePunches) {
    auto rng = Rng::system();
    const auto keys = ServerKeys<G>::generate(rng);
    auto [s, c] = issue<G>(rng);
    std::tie(s, c) = client_multi_punch<G>(keys.pk, s, c, server_multi_punch<G>(keys, c.p, 4, rng), 4, rng);
    std::tie(s, c) = client_punch<G>(keys.pk, s, c, server_punch<G>(keys, c.p, rng), rng);
    auto db = RedeemDb::in_memory();
    EXPECT_EQ(server_verify<G>(keys, db, client_redeem<G>(s, c), 5), VerifyOutcome::Accepted);
}

TEST(MultiPunch, LimitsAndTampering) {
    auto rng = Rng::system();
    const auto keys = ServerKeys<G>::generate(rng);
    auto [s, c] = issue<G>(rng);
    EXPECT_THROW(server_multi_punch<G>(keys, c.p, 0, rng), PromotionTooLarge);
    EXPECT_THROW(server_multi_punch<G>(keys, c.p, 11, rng), PromotionTooLarge);
    EXPECT_NO_THROW(server_multi_punch<G>(keys, c.p, 11, rng, 20));
    auto resp = server_multi_punch<G>(keys, c.p, 3, rng);
    std::swap(resp.links[0], resp.links[1]);
    EXPECT_THROW(client_multi_punch<G>(keys.pk, s, c, resp, 3, rng), ProofRejected);
    const auto bytes = server_multi_punch<G>(keys, c.p, 2, rng).serialize();
    EXPECT_EQ(bytes.size(), 1u + 2 * 128);
    EXPECT_EQ(MultiPunchResponse<G>::deserialize(bytes).links.size(), 2u);
    EXPECT_THROW(MultiPunchResponse<G>::deserialize(ByteView(bytes).first(200)), InvalidEncoding);
}

TEST(Ticket, AttributesVerifyPerSlot) {
    auto rng = Rng::system();
    const auto keys = ServerKeys<G>::generate(rng);
    const std::vector<std::string> slots{"class", "zone", "child"};
    const std::vector<std::uint32_t> values{1, 3, 0};
    auto ticket = issue_ticket<G>(slots, rng);
    ticket = client_ticket_punch<G>(keys.pk, ticket, server_ticket_punch<G>(keys, ticket.cards, values, rng), values, rng);
    const auto red = redeem_ticket<G>(ticket);
    auto db = RedeemDb::in_memory();
    EXPECT_EQ(verify_ticket<G>(keys, db, red, {{"class", 1}, {"zone", 2}, {"child", 0}}), VerifyOutcome::BadCard);
    EXPECT_EQ(verify_ticket<G>(keys, db, red, {{"zone", 3}, {"class", 1}, {"child", 0}}), VerifyOutcome::BadCard);
    EXPECT_EQ(verify_ticket<G>(keys, db, red, {{"class", 1}, {"zone", 3}, {"child", 0}}), VerifyOutcome::Accepted);
    EXPECT_EQ(verify_ticket<G>(keys, db, red, {{"class", 1}, {"zone", 3}, {"child", 0}}), VerifyOutcome::DoubleSpend);
    EXPECT_THROW(issue_ticket<G>({"a", "a"}, rng), std::invalid_argument);
}

TEST(Expiry, Boundaries) {
    EXPECT_EQ(period_start(parse_date("2026-08-20"), ExpiryGranularity::Quarter), parse_date("2026-07-01"));
    EXPECT_EQ(period_start(parse_date("2026-08-20"), ExpiryGranularity::Month), parse_date("2026-08-01"));
    EXPECT_EQ(period_start(parse_date("2026-08-20"), ExpiryGranularity::Year), parse_date("2026-01-01"));
    EXPECT_EQ(add_periods(parse_date("2026-10-01"), 2, ExpiryGranularity::Quarter), parse_date("2027-04-01"));
    EXPECT_TRUE(is_boundary(parse_date("2027-01-01"), ExpiryGranularity::Quarter));
    EXPECT_FALSE(is_boundary(parse_date("2027-02-01"), ExpiryGranularity::Quarter));
    EXPECT_EQ(max_expiry(parse_date("2026-08-20"), {ExpiryGranularity::Quarter, 8}), parse_date("2028-07-01"));
    EXPECT_EQ(format_date(parse_date("2026-02-28")), "2026-02-28");
    EXPECT_THROW(parse_date("2026-02-30"), BadExpiry);
    EXPECT_THROW(parse_date("yesterday"), BadExpiry);
}

TEST(Expiry, SecretLayoutAndStatus) {
    auto rng = Rng::system();
    const ExpiryPolicy policy{};
    const Date today = parse_date("2026-08-20");
    const Date expiry = parse_date("2027-01-01");
    const auto u = make_expiring_secret(expiry, today, policy, rng);
    // Big-endian days since 1970-01-01: 2027-01-01 is day 20819 = 0x00005153.
    EXPECT_EQ(to_hex(ByteView(u).first(4)), "00005153");
    EXPECT_EQ(secret_expiry(u), expiry);
    EXPECT_EQ(check_expiry(u, today, policy), ExpiryStatus::Valid);
    EXPECT_EQ(check_expiry(u, expiry, policy), ExpiryStatus::Valid);
    EXPECT_EQ(check_expiry(u, expiry + std::chrono::days(1), policy), ExpiryStatus::Expired);
    EXPECT_THROW(make_expiring_secret(parse_date("2027-01-02"), today, policy, rng), BadExpiry);
    EXPECT_THROW(make_expiring_secret(parse_date("2030-01-01"), today, policy, rng), BadExpiry);
    EXPECT_THROW(make_expiring_secret(parse_date("2026-07-01"), today, policy, rng), BadExpiry);
}

TEST(Expiry, VerifyAndPurge) {
    auto rng = Rng::system();
    const auto keys = ServerKeys<G>::generate(rng);
    const ExpiryPolicy policy{};
    const Date today = parse_date("2026-08-20");
    auto db = RedeemDb::in_memory();
    auto [s, c] = issue_expiring<G>(rng, parse_date("2026-10-01"), today, policy);
    auto [s2, c2] = issue_expiring<G>(rng, parse_date("2027-10-01"), today, policy);
    EXPECT_EQ(verify_expiring<G>(keys, db, client_redeem<G>(s, c), 0, today, policy), VerifyOutcome::Accepted);
    EXPECT_EQ(verify_expiring<G>(keys, db, client_redeem<G>(s2, c2), 0, today, policy), VerifyOutcome::Accepted);
    const Date later = parse_date("2026-10-02");
    EXPECT_EQ(purge_expired(db, later), 1u);
    EXPECT_EQ(verify_expiring<G>(keys, db, client_redeem<G>(s, c), 0, later, policy), VerifyOutcome::Expired);
    EXPECT_EQ(verify_expiring<G>(keys, db, client_redeem<G>(s2, c2), 0, later, policy), VerifyOutcome::DoubleSpend);

    // Random u: the leading bytes decode to some far-off date, which is refused.
    auto [s3, c3] = issue<G>(rng);
    s3.u[0] = 0xff;
    EXPECT_EQ(verify_expiring<G>(keys, db, client_redeem<G>(s3, c3), 0, today, policy), VerifyOutcome::BadCard);
}

TEST(RedemptionProof, TwoFlowRedemption) {
    auto rng = Rng::system();
    PunchServer<G> server(ServerKeys<G>::generate(rng));
    auto db = RedeemDb::in_memory();
    RedemptionRegistry registry;
    ProvableRedemptionServer<G> provable(server, db, registry);
    auto card = issue_with_redemption_proof<G>(rng);
    const auto req = client_redeem<G>(card.secret, card.card);
    EXPECT_EQ(provable.begin(req, 1).outcome, VerifyOutcome::BadCard);
    EXPECT_EQ(provable.begin(req, 0).outcome, VerifyOutcome::Accepted);
    EXPECT_EQ(provable.finish(req.u, card.rs), VerifyOutcome::Accepted);
    const auto again = provable.begin(req, 0);
    EXPECT_EQ(again.outcome, VerifyOutcome::DoubleSpend);
    ASSERT_TRUE(again.prior_rs.has_value());
    EXPECT_TRUE(confirm_prior_redemption(req.u, *again.prior_rs));
    // finish without begin is refused.
    EXPECT_EQ(provable.finish(rng.bytes<32>(), rng.bytes<32>()), VerifyOutcome::BadCard);
}

TEST(RedemptionProof, RegistryPersists) {
    testing::TempDir dir;
    auto rng = Rng::system();
    const auto rs = rng.bytes<32>();
    const auto u = derive_card_secret(rs);
    {
        RedemptionRegistry reg(dir / "rs.log", false);
        reg.record(u, rs);
    }
    RedemptionRegistry reg(dir / "rs.log", false);
    EXPECT_EQ(reg.size(), 1u);
    EXPECT_EQ(reg.lookup(u), rs);
    EXPECT_FALSE(reg.lookup(rs).has_value());
}

TEST(RedemptionProof, DerivationIsTaggedHash) {
    const Secret32 rs{};
    const auto digest = tagged_hash(tags::kRedemptionSecret, rs);
    EXPECT_EQ(to_hex(derive_card_secret(rs)), to_hex(ByteView(digest).first(32)));
}

}  // namespace
}  // namespace punchcard
