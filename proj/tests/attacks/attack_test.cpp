#include <gtest/gtest.h>

#include <iostream>

#include "attacks.hpp"

namespace punchcard::testing {
namespace {

// Shared across the scenarios below, checked last.
Ledger& ledger() {
    static Ledger l;
    return l;
}

void expect_passed(const AttackReport& r) {
    std::cout << r.to_json().dump() << std::endl;
    EXPECT_EQ(r.false_accepts, 0u) << r.to_json().dump(2);
    EXPECT_EQ(r.false_rejects, 0u) << r.to_json().dump(2);
    EXPECT_TRUE(r.failures.empty()) << r.to_json().dump(2);
    EXPECT_GT(r.attempts, 0u);
}

TEST(Attacks, CardReplay) {
    const auto r = attack_card_replay(ledger());
    expect_passed(r);
    // The control: the unhashed verification rule falls for every replay.
    EXPECT_EQ(r.details["strawman_accepts"].get<int>(), 20);
    EXPECT_EQ(r.details["toy_over_redemption_attempts"].get<int>(), 40 * 9 * 5);
}

TEST(Attacks, KeySwitch) {
    const auto r = attack_key_switch(ledger());
    expect_passed(r);
    EXPECT_GE(r.attempts, 1000u);
    EXPECT_EQ(r.details["honest_punches_accepted"].get<int>(), 200);
}

TEST(Attacks, EavesdropperTheft) {
    const auto r = attack_eavesdropper_theft(ledger());
    expect_passed(r);
    EXPECT_GE(r.attempts, 10'000u);
    EXPECT_EQ(r.details["race_accepts"].get<int>(), 0);
}

TEST(Attacks, ZAccountingInvariant) {
    const auto& l = ledger();
    std::cout << nlohmann::json{{"c_punch", l.c_punch}, {"c_redeem", l.c_redeem}}.dump() << std::endl;
    EXPECT_GT(l.c_redeem, 0u);
    EXPECT_LE(l.c_redeem, l.c_punch);
}

TEST(Attacks, SmallerBoundsStillSound) {
    Ledger l;
    AttackOptions opt;
    opt.max_n = 3;
    opt.key_switch_trials = 30;
    opt.forgeries = 300;
    opt.seed = 99;
    for (const auto& r : {attack_card_replay(l, opt), attack_key_switch(l, opt), attack_eavesdropper_theft(l, opt)})
        EXPECT_EQ(r.false_accepts, 0u) << r.scenario;
    EXPECT_LE(l.c_redeem, l.c_punch);
}

}  // namespace
}  // namespace punchcard::testing
