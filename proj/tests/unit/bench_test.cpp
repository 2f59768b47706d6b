#include <gtest/gtest.h>

#include <stdexcept>

#include "punchcard/bench/harness.hpp"

namespace punchcard::bench {
namespace {

TEST(Bench, RefusesTooFewTrials) {
    EXPECT_THROW(bench_main({99}), std::invalid_argument);
    EXPECT_THROW(bench_mergeable({10}), std::invalid_argument);
    EXPECT_THROW(bench_verify_scaling({0}, 50), std::invalid_argument);
}

TEST(Bench, SummaryStatistics) {
    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.stddev, 1.2909944, 1e-6);  // sample deviation
    EXPECT_EQ(s.count, 4u);
}

TEST(Bench, MainTable) {
    const auto t = bench_main({100, 1000, 10, 7});
    EXPECT_EQ(t.trials, 100u);
    EXPECT_EQ(t.db_size, 1000u);
    EXPECT_EQ(t.rows.size(), 6u);
    EXPECT_EQ(t.row("ServerSetup").bytes, 32u);
    EXPECT_EQ(t.row("Issue").bytes, 0u);
    EXPECT_EQ(t.row("ClientPunch").bytes, 32u);
    EXPECT_EQ(t.row("ServerPunch").bytes, 128u);
    EXPECT_EQ(t.row("ClientRedeem").bytes, 64u);
    for (const auto& r : t.rows) {
        EXPECT_EQ(r.ms.count, 100u) << r.operation;
        EXPECT_GT(r.ms.mean, 0.0) << r.operation;
    }
    EXPECT_THROW(t.row("Nope"), std::out_of_range);

    const auto csv = t.to_csv();
    EXPECT_EQ(csv.rfind("scheme,operation,trials,db_size,mean_ms,stddev_ms,bytes\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    EXPECT_EQ(t.to_csv(false).find("scheme,"), std::string::npos);
    EXPECT_NE(t.to_text().find("ServerVerify"), std::string::npos);
}

TEST(Bench, MergeableTable) {
    const auto t = bench_mergeable({100, 0, 4, 7});
    EXPECT_EQ(t.row("ServerSetup").bytes, 144u);
    EXPECT_EQ(t.row("Issue").bytes, 0u);
    EXPECT_EQ(t.row("ClientPunch").bytes, 144u);
    EXPECT_EQ(t.row("ServerPunch").bytes, 496u);
    EXPECT_EQ(t.row("ClientRedeem").bytes, 640u);
}

TEST(Bench, ScalingRows) {
    const auto rows = bench_verify_scaling({0, 5000}, 100);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].db_size, 5000u);
    EXPECT_EQ(rows[0].us.count, 100u);
    const auto csv = scaling_to_csv(rows);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_FALSE(scaling_to_text(rows).empty());
}

TEST(Bench, ParallelHasOneContendedAccept) {
    const auto r = bench_parallel(8, 5, 3);
    EXPECT_EQ(r.threads, 8u);
    EXPECT_EQ(r.cycles, 40u);
    EXPECT_EQ(r.accepted, 40u);
    EXPECT_EQ(r.contended_attempts, 8u);
    EXPECT_EQ(r.contended_accepts, 1u);
}

}  // namespace
}  // namespace punchcard::bench
