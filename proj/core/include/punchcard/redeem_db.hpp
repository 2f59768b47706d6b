#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>

#include "punchcard/bytes.hpp"
#include "punchcard/storage.hpp"

namespace punchcard {

enum class InsertResult { Inserted, AlreadyPresent };

struct RedeemDbOptions {
    /// fsync the log after each accepted redemption.
    bool sync = true;
    /// Fold the log into the snapshot once it holds this many records.
    std::size_t compact_after = 1'000'000;
    FaultInjector* faults = nullptr;
};

/// Set of spent 32-byte card secrets.
///
/// Persistent instances keep a snapshot (`redeemed.snap`, sorted keys) and an
/// append log (`redeemed.log`) in one directory; an in-memory hash index gives
/// amortized O(1) membership. check_and_insert is linearizable: no two callers
/// can both insert the same secret, and multi-secret inserts are all-or-nothing.
class RedeemDb {
public:
    static RedeemDb in_memory();
    static RedeemDb open(const std::filesystem::path& dir, RedeemDbOptions options = {});

    RedeemDb(RedeemDb&&) noexcept;
    RedeemDb& operator=(RedeemDb&&) noexcept;
    ~RedeemDb();

    InsertResult check_and_insert(std::span<const Secret32> secrets);
    InsertResult check_and_insert(const Secret32& secret) { return check_and_insert(std::span(&secret, 1)); }

    bool contains(const Secret32& secret) const;
    std::size_t size() const;
    bool persistent() const;

    /// Inserts without per-record fsync; for pre-populating benchmarks and fixtures.
    void bulk_insert(std::span<const Secret32> secrets);

    /// Removes every secret matching `expired` and compacts. Requires that no
    /// other thread uses the database concurrently.
    std::size_t purge_if(const std::function<bool(const Secret32&)>& expired);

    /// Rewrites the snapshot with the full set and empties the log.
    void compact();
    void flush();

private:
    struct Impl;
    explicit RedeemDb(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

}  // namespace punchcard
