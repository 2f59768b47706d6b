// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "attacks.hpp"
#include "checks.hpp"
#include "crash_sweep.hpp"
#include "temp_dir.hpp"

using namespace punchcard::testing;

namespace {

struct Outcome {
    bool ok;
    std::string detail;
};

Outcome from(const CheckResult& r) { return {r.ok, r.describe()}; }

int failed = 0;

void criterion(int number, const std::string& name, const std::function<Outcome()>& run) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.ok) ++failed;
    std::printf("%s  %2d  %-28s %s (%.1f s)\n", o.ok ? "PASS" : "FAIL", number, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

}  // namespace

int main() {
    criterion(1, "wire sizes, main", [] { return from(check_main_wire_sizes()); });
    criterion(2, "wire sizes, mergeable", [] { return from(check_merge_wire_sizes()); });
    criterion(3, "correctness", [] { return from(check_correctness(1000, 10, 100)); });
    criterion(4, "toy oracle equivalence", [] {
        auto main = check_toy_main_oracle(8, 20, 4);
        auto merge = check_toy_merge_oracle(6, 8, 6);
        return Outcome{main.ok && merge.ok, "main: " + main.describe() + "; mergeable: " + merge.describe()};
    });
    criterion(5, "adversarial suite", [] {
        Ledger ledger;
        const AttackReport reports[] = {attack_card_replay(ledger), attack_key_switch(ledger),
                                        attack_eavesdropper_theft(ledger)};
        bool ok = ledger.sound();
        std::string detail;
        for (const auto& r : reports) {
            ok = ok && r.passed();
            detail += r.scenario + " " + (r.passed() ? "pass" : "FAIL") + " (" + std::to_string(r.attempts) +
                      " attempts, " + std::to_string(r.false_accepts) + " accepted); ";
            if (!r.passed()) std::cerr << r.to_json().dump(2) << "\n";
        }
        detail += "c_redeem " + std::to_string(ledger.c_redeem) + " <= c_punch " + std::to_string(ledger.c_punch);
        return Outcome{ok, detail};
    });
    criterion(6, "proof robustness", [] { return from(check_proof_robustness(true, 1000)); });
    criterion(7, "verify scaling", [] { return from(check_verify_scaling({0, 10'000, 1'000'000}, 1000, 1.5)); });
    criterion(8, "performance smoke", [] { return from(check_performance(200, 10.0, 1.0)); });
    criterion(9, "crash safety", [] {
        TempDir scratch("punchcard-acceptance");
        const auto wallet = sweep_wallet_punch(scratch.path(), 25);
        const auto server = sweep_server_redeem(scratch.path(), 25);
        return Outcome{wallet.ok() && server.ok(),
                       "wallet punch: " + wallet.describe() + "; server redeem: " + server.describe()};
    });
    criterion(10, "extension properties", [] {
        TempDir scratch("punchcard-acceptance");
        auto multi = check_multi_punch_additivity(8, 10);
        auto expiry = check_expiry_purge_replay(scratch.path());
        auto rs = check_redemption_proof(10'000);
        return Outcome{multi.ok && expiry.ok && rs.ok, "multi-punch: " + multi.describe() +
                                                           "; expiry: " + expiry.describe() +
                                                           "; redemption proof: " + rs.describe()};
    });
    return failed == 0 ? 0 : 1;
}
