#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include <spdlog/sinks/null_sink.h>
#include <spdlog/sinks/ostream_sink.h>

#include "punchcard/client/wallet.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/extensions/redemption_proof.hpp"
#include "punchcard/server/service.hpp"
#include "temp_dir.hpp"
#include "transports.hpp"

namespace punchcard::client {
namespace {

using testing::DroppingTransport;
using testing::TamperingTransport;
using testing::TempDir;

Secret32 random_secret() {
    auto rng = Rng::system();
    Secret32 s{};
    const auto b = random_nonzero<MainGroup::Scalar>(rng).to_bytes();
    std::copy(b.begin(), b.end(), s.begin());
    return s;
}

std::shared_ptr<spdlog::logger> quiet() {
    return std::make_shared<spdlog::logger>("wallet-test", std::make_shared<spdlog::sinks::null_sink_mt>());
}

class WalletTest : public ::testing::Test {
protected:
    WalletTest() : main_svc_(config(Scheme::Main, 3), RedeemDb::in_memory(), random_secret(), quiet()),
                   merge_svc_(config(Scheme::Mergeable, 4), RedeemDb::in_memory(), random_secret(), quiet()),
                   main_(main_svc_), merge_(merge_svc_) {}

    static server::ServerConfig config(Scheme scheme, std::uint16_t n) {
        server::ServerConfig c;
        c.scheme = scheme;
        c.accepted_n = {n};
        return c;
    }

    Wallet fresh() {
        auto w = Wallet::in_memory({false, 64, nullptr, quiet()});
        w.fetch_public_key(Scheme::Main, main_);
        return w;
    }

    server::Service main_svc_;
    server::Service merge_svc_;
    server::LoopbackTransport main_;
    server::LoopbackTransport merge_;
};

TEST_F(WalletTest, NewCardNeedsOnlyTheKey) {
    auto w = Wallet::in_memory({false, 64, nullptr, quiet()});
    EXPECT_THROW(w.new_card(Scheme::Main), WalletError);
    w.set_public_key(Scheme::Main, main_svc_.public_key());
    std::set<Secret32> seen;
    for (int i = 0; i < 100; ++i) seen.insert(w.card(w.new_card(Scheme::Main)).secret_u());
    EXPECT_EQ(seen.size(), 100u);
    EXPECT_EQ(main_svc_.stats().total(server::AggregateStats::Counter::Punches), 0u);
    EXPECT_THROW(w.set_public_key(Scheme::Main, Bytes(31, 1)), Error);
}

TEST_F(WalletTest, ExpiringCardCarriesItsDate) {
    auto w = fresh();
    NewCardOptions opt;
    opt.today = parse_date("2026-10-16");
    opt.expiry = parse_date("2027-01-01");
    const auto id = w.new_card(Scheme::Main, opt);
    const auto u = w.card(id).secret_u();
    EXPECT_EQ(to_hex(ByteView(u).first(4)), "00005153");
    EXPECT_EQ(w.list().at(0).expiry, opt.expiry);
    opt.expiry = parse_date("2027-01-02");
    EXPECT_THROW(w.new_card(Scheme::Main, opt), BadExpiry);
    opt.redemption_proof = true;
    opt.expiry = parse_date("2027-01-01");
    EXPECT_THROW(w.new_card(Scheme::Main, opt), WalletError);
}

TEST_F(WalletTest, RejectedProofLeavesTheCardAlone) {
    auto w = fresh();
    const auto id = w.new_card(Scheme::Main);
    w.punch(id, main_);
    const auto before = w.card(id).encode();

    server::Service rogue(config(Scheme::Main, 3), RedeemDb::in_memory(), random_secret(), quiet());
    server::LoopbackTransport rogue_loop(rogue);
    EXPECT_THROW(w.punch(id, rogue_loop), ProofRejected);
    EXPECT_EQ(w.card(id).encode(), before);

    TamperingTransport flip(main_, [](wire::Frame& f) { f.body[40] ^= 1; });
    EXPECT_THROW(w.punch(id, flip), ProofRejected);
    TamperingTransport cut(main_, [](wire::Frame& f) { f.body.pop_back(); });
    EXPECT_THROW(w.punch(id, cut), ProofRejected);
    EXPECT_EQ(w.card(id).encode(), before);

    DroppingTransport drop(main_);
    EXPECT_THROW(w.punch(id, drop), TransportError);
    EXPECT_EQ(drop.delivered, 1u);
    EXPECT_EQ(w.card(id).encode(), before);

    w.punch(id, main_);
    w.punch(id, main_);
    EXPECT_EQ(w.redeem(id, main_, 3), VerifyOutcome::Accepted);
}

TEST_F(WalletTest, RedeemGuards) {
    auto w = fresh();
    const auto id = w.new_card(Scheme::Main);
    w.punch(id, main_);
    EXPECT_THROW(w.redeem(id, main_, 3), WalletError);
    EXPECT_EQ(w.redeem(id, main_, 3, true), VerifyOutcome::BadCard);
    EXPECT_FALSE(w.card(id).spent);
    EXPECT_EQ(w.punch(id, main_, 2), 3u);
    EXPECT_EQ(w.redeem(id, main_, 3), VerifyOutcome::Accepted);
    EXPECT_TRUE(w.card(id).spent);
    EXPECT_THROW(w.redeem(id, main_, 3), WalletError);
    EXPECT_THROW(w.punch(id, main_), WalletError);
    EXPECT_THROW(w.punch(99, main_), WalletError);
    EXPECT_THROW(w.redeem(id, merge_, 3, true), ProtocolError);
}

TEST_F(WalletTest, MergeRedeem) {
    auto w = Wallet::in_memory({false, 64, nullptr, quiet()});
    w.fetch_public_key(Scheme::Mergeable, merge_);
    EXPECT_EQ(w.public_key(Scheme::Mergeable)->size(), 144u);
    const auto a = w.new_card(Scheme::Mergeable);
    const auto b = w.new_card(Scheme::Mergeable);
    w.punch(a, merge_);
    w.punch(b, merge_);
    EXPECT_THROW(w.punch(a, merge_, 2), WalletError);
    EXPECT_THROW(w.redeem(a, merge_, 1, true), WalletError);
    EXPECT_THROW(w.merge_redeem(a, b, merge_, 4), WalletError);
    EXPECT_THROW(w.merge_redeem(a, a, merge_, 2), WalletError);
    w.punch(a, merge_);
    w.punch(b, merge_);
    EXPECT_EQ(w.merge_redeem(a, b, merge_, 4), VerifyOutcome::Accepted);
    EXPECT_TRUE(w.card(a).spent);
    EXPECT_TRUE(w.card(b).spent);
}

TEST_F(WalletTest, PersistsAcrossReopen) {
    TempDir dir;
    const auto path = dir / "cards.pcw";
    CardId id = 0, spent = 0;
    {
        auto w = Wallet::open(path, {true, 4, nullptr, quiet()});
        w.fetch_public_key(Scheme::Main, main_);
        id = w.new_card(Scheme::Main);
        spent = w.new_card(Scheme::Main);
        for (int i = 0; i < 3; ++i) w.punch(spent, main_);
        EXPECT_EQ(w.redeem(spent, main_, 3), VerifyOutcome::Accepted);
        w.punch(id, main_);
        w.punch(id, main_);
    }
    EXPECT_GT(Wallet::verify_file(path), 0u);
    {
        auto w = Wallet::open(path, {true, 64, nullptr, quiet()});
        EXPECT_EQ(w.size(), 2u);
        EXPECT_EQ(w.card(id).punches(), 2u);
        EXPECT_TRUE(w.card(spent).spent);
        EXPECT_EQ(*w.public_key(Scheme::Main), main_svc_.public_key());
        EXPECT_EQ(w.prune_spent(), 1u);
        w.compact();
        const auto next = w.new_card(Scheme::Main);
        EXPECT_GT(next, spent);
    }
    auto w = Wallet::open(path, {true, 64, nullptr, quiet()});
    EXPECT_EQ(w.size(), 2u);
    w.punch(id, main_);
    EXPECT_EQ(w.redeem(id, main_, 3), VerifyOutcome::Accepted);
    EXPECT_THROW(Wallet::open(path, {true, 64, nullptr, quiet()}).card(spent), WalletError);
}

TEST_F(WalletTest, RedemptionProofCard) {
    auto w = fresh();
    NewCardOptions opt;
    opt.redemption_proof = true;
    const auto id = w.new_card(Scheme::Main, opt);
    const auto rec = w.card(id);
    ASSERT_TRUE(rec.rs.has_value());
    EXPECT_EQ(derive_card_secret(*rec.rs), rec.secret_u());
    EXPECT_TRUE(w.list().at(0).redemption_proof);
}

TEST_F(WalletTest, RecordRoundTrip) {
    auto w = fresh();
    NewCardOptions opt;
    opt.today = parse_date("2026-10-16");
    opt.expiry = parse_date("2027-04-01");
    const auto id = w.new_card(Scheme::Main, opt);
    w.punch(id, main_);
    const auto rec = w.card(id);
    const auto back = CardRecord::decode(rec.encode());
    EXPECT_EQ(back.id, rec.id);
    EXPECT_EQ(back.expiry, rec.expiry);
    EXPECT_EQ(back.state, rec.state);
    EXPECT_EQ(back.punches(), 1u);
    auto bad = rec.encode();
    bad.pop_back();
    EXPECT_THROW(CardRecord::decode(bad), InvalidEncoding);
}

TEST_F(WalletTest, LogsCarryNoSecrets) {
    std::ostringstream text;
    auto log = std::make_shared<spdlog::logger>("w", std::make_shared<spdlog::sinks::ostream_sink_mt>(text));
    log->set_level(spdlog::level::trace);
    auto w = Wallet::in_memory({false, 64, nullptr, log});
    w.fetch_public_key(Scheme::Main, main_);
    const auto id = w.new_card(Scheme::Main);
    for (int i = 0; i < 3; ++i) w.punch(id, main_);
    server::Service rogue(config(Scheme::Main, 3), RedeemDb::in_memory(), random_secret(), quiet());
    server::LoopbackTransport rogue_loop(rogue);
    EXPECT_THROW(w.punch(id, rogue_loop), ProofRejected);
    w.redeem(id, main_, 3);
    const auto rec = w.card(id);
    const auto st = rec.main_state();
    EXPECT_NE(text.str().find("card"), std::string::npos);
    EXPECT_EQ(text.str().find(to_hex(rec.secret_u())), std::string::npos);
    EXPECT_EQ(text.str().find(to_hex(ByteView(rec.secret_u()).first(6))), std::string::npos);
    EXPECT_EQ(text.str().find(to_hex(st.secret.m.to_bytes())), std::string::npos);
}

}  // namespace
}  // namespace punchcard::client
