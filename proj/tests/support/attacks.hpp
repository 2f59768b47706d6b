#pragma once

// Adversarial scenarios run against real components. Every scenario routes
// its traffic through the same ledger so the soundness accounting (punches
// honoured at redemption never exceed punches performed) covers all of them.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace punchcard::testing {

struct Ledger {
    /// Punches the server performed (t for a promotion of t).
    std::uint64_t c_punch = 0;
    /// Sum of n over accepted redemptions.
    std::uint64_t c_redeem = 0;

    bool sound() const { return c_redeem <= c_punch; }
};

struct AttackReport {
    std::string scenario;
    std::uint64_t attempts = 0;
    std::uint64_t false_accepts = 0;
    std::uint64_t false_rejects = 0;
    std::vector<std::string> failures;
    nlohmann::json details = nlohmann::json::object();

    bool passed() const { return false_accepts == 0 && false_rejects == 0 && failures.empty(); }
    nlohmann::json to_json() const;
};

struct AttackOptions {
    std::uint16_t max_n = 20;
    std::size_t key_switch_trials = 1000;
    std::size_t forgeries = 10'000;
    std::uint64_t seed = 1;
};

AttackReport attack_card_replay(Ledger& ledger, const AttackOptions& options = {});
AttackReport attack_key_switch(Ledger& ledger, const AttackOptions& options = {});
AttackReport attack_eavesdropper_theft(Ledger& ledger, const AttackOptions& options = {});

}  // namespace punchcard::testing
