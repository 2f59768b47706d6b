#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include <spdlog/sinks/ostream_sink.h>

#include "punchcard/client/wallet.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/server/service.hpp"
#include "punchcard/server/tcp_server.hpp"

namespace punchcard::server {
namespace {

using wire::ErrorCode;
using wire::Frame;
using wire::MsgType;
using Counter = AggregateStats::Counter;

Secret32 random_secret(Rng& rng) {
    Secret32 s{};
    const auto b = random_nonzero<MainGroup::Scalar>(rng).to_bytes();
    std::copy(b.begin(), b.end(), s.begin());
    return s;
}

class ServiceTest : public ::testing::Test {
protected:
    Rng rng = Rng::system();
    std::ostringstream log_text;
    std::shared_ptr<spdlog::logger> logger =
        std::make_shared<spdlog::logger>("svc", std::make_shared<spdlog::sinks::ostream_sink_mt>(log_text));

    std::unique_ptr<Service> make(Scheme scheme, std::vector<std::uint16_t> n = {3}, bool opaque = false) {
        ServerConfig cfg;
        cfg.scheme = scheme;
        cfg.accepted_n = std::move(n);
        cfg.opaque_reject = opaque;
        cfg.t_max = 5;
        logger->set_level(spdlog::level::trace);
        return std::make_unique<Service>(cfg, RedeemDb::in_memory(), random_secret(rng), logger);
    }

    static ErrorCode error_of(const Frame& f) {
        EXPECT_EQ(f.type, MsgType::Error);
        return wire::parse_error(f).first;
    }
};

TEST_F(ServiceTest, PublicKeyFrame) {
    auto svc = make(Scheme::Main);
    const auto reply = svc->handle({MsgType::GetPkReq, {}});
    EXPECT_EQ(reply.type, MsgType::GetPkResp);
    EXPECT_EQ(reply.body, svc->public_key());
    EXPECT_EQ(reply.body.size(), 32u);
    EXPECT_EQ(make(Scheme::Mergeable)->public_key().size(), 144u);
}

TEST_F(ServiceTest, ProtocolErrors) {
    auto svc = make(Scheme::Main);
    EXPECT_EQ(error_of(svc->handle({MsgType::PunchReq, Bytes(31, 0)})), ErrorCode::Malformed);
    EXPECT_EQ(error_of(svc->handle({MsgType::PunchReq, Bytes(32, 0xff)})), ErrorCode::Malformed);
    EXPECT_EQ(error_of(svc->handle({MsgType::PunchResp, Bytes(128, 0)})), ErrorCode::UnsupportedType);
    EXPECT_EQ(error_of(svc->handle({MsgType::MergePunchReq, Bytes(144, 0)})), ErrorCode::WrongScheme);
    const auto g = MainGroup::encode(MainGroup::generator());
    Bytes multi(g.begin(), g.end());
    multi.push_back(6);
    EXPECT_EQ(error_of(svc->handle({MsgType::MultiPunchReq, multi})), ErrorCode::PromotionTooLarge);
    Bytes req(32, 0);
    req.insert(req.end(), g.begin(), g.end());
    const auto redeem = wire::make_redeem_request(MsgType::RedeemReq, req, 4);
    EXPECT_EQ(error_of(svc->handle(redeem)), ErrorCode::PunchCountNotAccepted);
    EXPECT_GE(svc->stats().total(Counter::ProtocolErrors), 4u);
}

TEST_F(ServiceTest, FullCycleAndStats) {
    auto svc = make(Scheme::Main);
    LoopbackTransport loop(*svc);
    auto wallet = client::Wallet::in_memory();
    wallet.fetch_public_key(Scheme::Main, loop);
    const auto id = wallet.new_card(Scheme::Main);
    wallet.punch(id, loop, 2);
    wallet.punch(id, loop);
    EXPECT_EQ(wallet.redeem(id, loop, 3), VerifyOutcome::Accepted);
    EXPECT_EQ(wallet.redeem(id, loop, 3, true), VerifyOutcome::DoubleSpend);
    EXPECT_EQ(svc->stats().total(Counter::Punches), 2u);
    EXPECT_EQ(svc->stats().total(Counter::PromotionPunches), 2u);
    EXPECT_EQ(svc->stats().total(Counter::Redeemed), 1u);
    EXPECT_EQ(svc->stats().total(Counter::RejectDoubleSpend), 1u);
}

TEST_F(ServiceTest, OpaqueModeHidesTheReason) {
    auto svc = make(Scheme::Main, {3}, true);
    LoopbackTransport loop(*svc);
    auto wallet = client::Wallet::in_memory();
    wallet.fetch_public_key(Scheme::Main, loop);
    const auto id = wallet.new_card(Scheme::Main);
    for (int i = 0; i < 3; ++i) wallet.punch(id, loop);
    EXPECT_EQ(wallet.redeem(id, loop, 3), VerifyOutcome::Accepted);
    EXPECT_EQ(wallet.redeem(id, loop, 3, true), VerifyOutcome::BadCard);
    EXPECT_EQ(svc->stats().total(Counter::RejectDoubleSpend), 1u);
}

TEST_F(ServiceTest, MergeableCycle) {
    auto svc = make(Scheme::Mergeable, {4});
    LoopbackTransport loop(*svc);
    auto wallet = client::Wallet::in_memory();
    wallet.fetch_public_key(Scheme::Mergeable, loop);
    const auto a = wallet.new_card(Scheme::Mergeable);
    const auto b = wallet.new_card(Scheme::Mergeable);
    wallet.punch(a, loop);
    for (int i = 0; i < 3; ++i) wallet.punch(b, loop);
    EXPECT_EQ(wallet.merge_redeem(a, b, loop, 4), VerifyOutcome::Accepted);
    EXPECT_EQ(svc->stats().total(Counter::MergeRedeemed), 1u);
    EXPECT_EQ(svc->db().size(), 2u);
    EXPECT_EQ(error_of(svc->handle({MsgType::PunchReq, Bytes(32, 0)})), ErrorCode::WrongScheme);
}

TEST_F(ServiceTest, LogsCarryNoSecrets) {
    auto svc = make(Scheme::Main);
    LoopbackTransport loop(*svc);
    auto wallet = client::Wallet::in_memory({true, 64, nullptr, logger});
    wallet.fetch_public_key(Scheme::Main, loop);
    const auto id = wallet.new_card(Scheme::Main);
    for (int i = 0; i < 3; ++i) wallet.punch(id, loop);
    wallet.redeem(id, loop, 3);
    wallet.redeem(id, loop, 3, true);
    svc->handle({MsgType::PunchReq, Bytes(32, 0xff)});
    svc->log_stats();
    const auto text = log_text.str();
    const auto rec = wallet.card(id);
    const auto st = rec.main_state();
    EXPECT_FALSE(text.empty());
    EXPECT_EQ(text.find(to_hex(rec.secret_u())), std::string::npos);
    EXPECT_EQ(text.find(to_hex(ByteView(rec.secret_u()).first(8))), std::string::npos);
    EXPECT_EQ(text.find(to_hex(st.secret.m.to_bytes())), std::string::npos);
    EXPECT_EQ(text.find(to_hex(MainGroup::encode(st.card.p))), std::string::npos);
}

TEST_F(ServiceTest, TcpRoundTripAndConcurrentRedeem) {
    auto svc = make(Scheme::Main, {1});
    TcpServer server(*svc, "127.0.0.1", 0);
    std::thread runner([&] { server.run(); });
    ASSERT_NE(server.port(), 0);

    auto wallet = client::Wallet::in_memory();
    {
        TcpTransport t("127.0.0.1", server.port());
        wallet.fetch_public_key(Scheme::Main, t);
    }
    const auto id = wallet.new_card(Scheme::Main);
    {
        TcpTransport t("127.0.0.1", server.port());
        wallet.punch(id, t);
    }
    const auto st = wallet.card(id).main_state();
    const auto frame = wire::make_redeem_request(MsgType::RedeemReq, client_redeem<MainGroup>(st.secret, st.card).serialize(), 1);
    std::atomic<int> accepted{0};
    std::vector<std::thread> clients;
    for (int i = 0; i < 8; ++i)
        clients.emplace_back([&] {
            TcpTransport t("127.0.0.1", server.port());
            const auto reply = t.roundtrip(frame);
            if (reply.type == MsgType::RedeemResp && reply.body.at(0) == 0) ++accepted;
        });
    for (auto& c : clients) c.join();
    EXPECT_EQ(accepted.load(), 1);
    server.stop();
    runner.join();
}

}  // namespace
}  // namespace punchcard::server
