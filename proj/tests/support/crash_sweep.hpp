#pragma once

// Simulated crashes at every durable write and checkpoint of a wallet punch
// and a server redemption, followed by recovery from what is on disk.

#include <filesystem>
#include <string>
#include <vector>

namespace punchcard::testing {

struct CrashCase {
    std::string plan;
    bool fired = false;
    bool ok = true;
    std::string detail;
};

struct CrashSweep {
    std::vector<CrashCase> cases;

    bool ok() const;
    std::size_t fired() const;
    std::string describe() const;
};

/// Each case: a card with j punches, one punch interrupted, reopen, then the
/// card must hold j or j + 1 punches and still be redeemable.
CrashSweep sweep_wallet_punch(const std::filesystem::path& scratch, std::size_t plans);

/// Each case: some acknowledged redemptions, one interrupted, reopen; the
/// acknowledged secrets must survive and the interrupted card must be accepted
/// at most once.
CrashSweep sweep_server_redeem(const std::filesystem::path& scratch, std::size_t plans);

}  // namespace punchcard::testing
