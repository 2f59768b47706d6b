#pragma once

// End-to-end property checks shared by the gtest suites and the acceptance
// runner. Each returns a CheckResult instead of asserting so the acceptance
// runner can print one line per property.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace punchcard::testing {

struct CheckResult {
    bool ok = true;
    std::size_t checks = 0;
    std::vector<std::string> failures;
    std::string summary;

    void expect(bool cond, const std::string& what) {
        ++checks;
        if (!cond) {
            ok = false;
            if (failures.size() < 20) failures.push_back(what);
        }
    }
    std::string describe() const;
};

struct WireSizes {
    std::size_t pk = 0, issue = 0, punch_request = 0, punch_response = 0, redeem_request = 0;
};

/// Sizes measured from frames exchanged with a real service.
WireSizes measure_main_wire_sizes();
WireSizes measure_merge_wire_sizes();
CheckResult check_main_wire_sizes();
CheckResult check_merge_wire_sizes();

/// `cycles` main-scheme cards punched n times and redeemed, each followed by a
/// duplicate redemption; plus `merge_cycles` mergeable pairs split n ways.
CheckResult check_correctness(std::size_t cycles, std::uint16_t n, std::size_t merge_cycles);

/// Main scheme over the toy group against the modular oracle, every punch count <= max_punches.
CheckResult check_toy_main_oracle(std::uint32_t max_punches, std::size_t reps, std::uint64_t seed);
/// Mergeable scheme over the toy pairing: single-card states <= max_punches and every split of n.
CheckResult check_toy_merge_oracle(std::uint16_t n, std::uint32_t max_punches, std::uint64_t seed);

/// Every single-byte corruption (all 255 deltas when exhaustive, else 3 per
/// position) of one punch response, plus wrong-key punches.
CheckResult check_proof_robustness(bool exhaustive, std::size_t wrong_key_trials);

CheckResult check_verify_scaling(const std::vector<std::size_t>& sizes, std::size_t trials, double max_ratio);
CheckResult check_performance(std::size_t trials, double max_punch_ms, double max_verify_ms);

CheckResult check_multi_punch_additivity(std::uint32_t max_sum, std::uint64_t seed);
CheckResult check_expiry_purge_replay(const std::filesystem::path& scratch);
CheckResult check_redemption_proof(std::size_t forgeries);

}  // namespace punchcard::testing
