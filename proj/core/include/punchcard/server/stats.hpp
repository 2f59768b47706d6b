#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>

namespace punchcard::server {

/// Counters over served operations, totalled and per hour. Holds no card
/// identifiers, secrets or group elements by construction: only counts.
class AggregateStats {
public:
    enum class Counter : std::size_t {
        Punches,
        PromotionPunches,
        MergePunches,
        Redeemed,
        MergeRedeemed,
        RejectBadCard,
        RejectDoubleSpend,
        RejectExpired,
        ProtocolErrors,
        kCount,
    };
    static constexpr std::size_t kCounters = static_cast<std::size_t>(Counter::kCount);
    static constexpr std::size_t kRetainedBuckets = 48;

    using Clock = std::chrono::system_clock;

    void add(Counter c, std::uint64_t n = 1, Clock::time_point now = Clock::now());
    std::uint64_t total(Counter c) const;
    /// Counts per hour bucket (hours since epoch), newest last.
    std::map<std::int64_t, std::array<std::uint64_t, kCounters>> buckets() const;

    std::string to_json() const;
    static std::string_view name(Counter c);

private:
    std::array<std::atomic<std::uint64_t>, kCounters> totals_{};
    mutable std::mutex mu_;
    std::map<std::int64_t, std::array<std::uint64_t, kCounters>> buckets_;
};

}  // namespace punchcard::server
