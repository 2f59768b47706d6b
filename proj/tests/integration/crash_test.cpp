#include <gtest/gtest.h>

#include <fstream>

#include "crash_sweep.hpp"
#include "faults.hpp"
#include "punchcard/client/wallet.hpp"
#include "punchcard/server/service.hpp"
#include "temp_dir.hpp"

namespace punchcard::testing {
namespace {

TEST(CrashSweep, WalletPunch) {
    TempDir dir;
    const auto sweep = sweep_wallet_punch(dir.path(), 25);
    ASSERT_EQ(sweep.cases.size(), 25u);
    EXPECT_TRUE(sweep.ok()) << sweep.describe();
    EXPECT_EQ(sweep.fired(), 25u) << "every plan should hit a real write or checkpoint";
}

TEST(CrashSweep, ServerRedeem) {
    TempDir dir;
    const auto sweep = sweep_server_redeem(dir.path(), 25);
    ASSERT_EQ(sweep.cases.size(), 25u);
    EXPECT_TRUE(sweep.ok()) << sweep.describe();
    EXPECT_EQ(sweep.fired(), 25u);
}

TEST(CrashSweep, PlansCoverEveryPoint) {
    TempDir dir;
    const auto wallet = sweep_wallet_punch(dir / "w", 25);
    const auto server = sweep_server_redeem(dir / "s", 25);
    auto covers = [](const CrashSweep& s, const std::string& point) {
        for (const auto& c : s.cases)
            if (c.plan.find(point) != std::string::npos) return true;
        return false;
    };
    for (const char* p : {"wallet.journal", "wallet.snapshot", "wallet.snapshot.before-rename", "wallet.after-snapshot"})
        EXPECT_TRUE(covers(wallet, p)) << p;
    for (const char* p : {"db.append", "db.snapshot", "db.snapshot.before-rename", "db.after-snapshot"})
        EXPECT_TRUE(covers(server, p)) << p;
}

// Garbage appended to the journal by a crash mid-append is dropped on open.
TEST(CrashRecovery, WalletTornJournalTail) {
    TempDir dir;
    const auto path = dir / "w.pcw";
    auto rng = Rng::system();
    const auto keys = ServerKeys<MainGroup>::generate(rng);
    {
        auto w = client::Wallet::open(path, {false, 64, nullptr, nullptr});
        w.set_public_key(Scheme::Main, keys.public_key_bytes());
        w.new_card(Scheme::Main);
    }
    {
        std::ofstream j(path.string() + ".journal", std::ios::binary | std::ios::app);
        const char torn[] = "\x40\x00\x00\x00partial";
        j.write(torn, sizeof torn - 1);
    }
    auto w = client::Wallet::open(path, {false, 64, nullptr, nullptr});
    EXPECT_EQ(w.size(), 1u);
    EXPECT_EQ(client::Wallet::verify_file(path), 1u);
}

// Damage before the tail is not a crash artifact and must not be papered over.
TEST(CrashRecovery, DbMidLogCorruptionIsFatal) {
    TempDir dir;
    {
        auto db = RedeemDb::open(dir.path(), {false, 1'000'000, nullptr});
        auto rng = Rng::system();
        for (int i = 0; i < 3; ++i) db.check_and_insert(rng.bytes<32>());
    }
    const auto log = dir / "redeemed.log";
    std::fstream f(log, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(12);
    f.put('\xff');
    f.close();
    EXPECT_THROW(RedeemDb::open(dir.path()), CorruptStore);
}

}  // namespace
}  // namespace punchcard::testing
