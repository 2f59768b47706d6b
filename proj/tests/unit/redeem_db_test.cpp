#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "punchcard/errors.hpp"
#include "punchcard/redeem_db.hpp"
#include "punchcard/rng.hpp"
#include "temp_dir.hpp"

namespace punchcard {
namespace {

using testing::TempDir;

TEST(RedeemDb, InsertOnce) {
    auto db = RedeemDb::in_memory();
    auto rng = Rng::seeded(1);
    const auto a = rng.bytes<32>(), b = rng.bytes<32>();
    EXPECT_EQ(db.check_and_insert(a), InsertResult::Inserted);
    EXPECT_EQ(db.check_and_insert(a), InsertResult::AlreadyPresent);
    EXPECT_TRUE(db.contains(a));
    EXPECT_FALSE(db.contains(b));
    EXPECT_EQ(db.size(), 1u);
    EXPECT_FALSE(db.persistent());
}

TEST(RedeemDb, PairsAreAllOrNothing) {
    auto db = RedeemDb::in_memory();
    auto rng = Rng::seeded(2);
    const auto a = rng.bytes<32>(), b = rng.bytes<32>(), c = rng.bytes<32>();
    EXPECT_EQ(db.check_and_insert(std::array{a, b}), InsertResult::Inserted);
    EXPECT_EQ(db.check_and_insert(std::array{c, b}), InsertResult::AlreadyPresent);
    EXPECT_FALSE(db.contains(c));
    EXPECT_EQ(db.check_and_insert(std::array{c, c}), InsertResult::AlreadyPresent);
    EXPECT_FALSE(db.contains(c));
}

TEST(RedeemDb, OneWinnerUnderContention) {
    auto db = RedeemDb::in_memory();
    const auto u = Rng::seeded(3).bytes<32>();
    std::atomic<int> wins{0};
    std::atomic<bool> go{false};
    std::vector<std::thread> threads;
    for (int i = 0; i < 64; ++i)
        threads.emplace_back([&] {
            while (!go.load()) std::this_thread::yield();
            if (db.check_and_insert(u) == InsertResult::Inserted) ++wins;
        });
    go = true;
    for (auto& t : threads) t.join();
    EXPECT_EQ(wins.load(), 1);
}

TEST(RedeemDb, PersistsAcrossReopenAndCompaction) {
    TempDir dir;
    auto rng = Rng::seeded(4);
    std::vector<Secret32> secrets;
    for (int i = 0; i < 50; ++i) secrets.push_back(rng.bytes<32>());
    {
        auto db = RedeemDb::open(dir.path(), {false, 16, nullptr});
        for (const auto& s : secrets) db.check_and_insert(s);
        EXPECT_TRUE(db.persistent());
    }
    auto db = RedeemDb::open(dir.path(), {false, 16, nullptr});
    EXPECT_EQ(db.size(), secrets.size());
    for (const auto& s : secrets) EXPECT_EQ(db.check_and_insert(s), InsertResult::AlreadyPresent);
    EXPECT_TRUE(std::filesystem::exists(dir / "redeemed.snap"));
}

TEST(RedeemDb, SecondOpenIsRefused) {
    TempDir dir;
    auto db = RedeemDb::open(dir.path(), {false});
    EXPECT_THROW(RedeemDb::open(dir.path(), {false}), StorageError);
}

TEST(RedeemDb, PurgeRemovesMatching) {
    TempDir dir;
    auto rng = Rng::seeded(5);
    Secret32 keep = rng.bytes<32>(), drop = rng.bytes<32>();
    keep[0] = 1;
    drop[0] = 0;
    {
        auto db = RedeemDb::open(dir.path(), {false});
        db.check_and_insert(keep);
        db.check_and_insert(drop);
        EXPECT_EQ(db.purge_if([](const Secret32& s) { return s[0] == 0; }), 1u);
    }
    auto db = RedeemDb::open(dir.path(), {false});
    EXPECT_TRUE(db.contains(keep));
    EXPECT_FALSE(db.contains(drop));
}

TEST(RedeemDb, BulkInsert) {
    auto db = RedeemDb::in_memory();
    auto rng = Rng::seeded(6);
    std::vector<Secret32> many(1000);
    for (auto& s : many) s = rng.bytes<32>();
    db.bulk_insert(many);
    EXPECT_EQ(db.size(), 1000u);
    EXPECT_TRUE(db.contains(many[999]));
}

}  // namespace
}  // namespace punchcard
