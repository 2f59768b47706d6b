#include "punchcard/server/stats.hpp"

#include <nlohmann/json.hpp>

namespace punchcard::server {

std::string_view AggregateStats::name(Counter c) {
    switch (c) {
        case Counter::Punches: return "punches";
        case Counter::PromotionPunches: return "promotion_punches";
        case Counter::MergePunches: return "merge_punches";
        case Counter::Redeemed: return "redeemed";
        case Counter::MergeRedeemed: return "merge_redeemed";
        case Counter::RejectBadCard: return "reject_bad_card";
        case Counter::RejectDoubleSpend: return "reject_double_spend";
        case Counter::RejectExpired: return "reject_expired";
        case Counter::ProtocolErrors: return "protocol_errors";
        case Counter::kCount: break;
    }
    return "unknown";
}

void AggregateStats::add(Counter c, std::uint64_t n, Clock::time_point now) {
    const auto i = static_cast<std::size_t>(c);
    totals_[i].fetch_add(n, std::memory_order_relaxed);
    const auto hour = std::chrono::duration_cast<std::chrono::hours>(now.time_since_epoch()).count();
    std::lock_guard lock(mu_);
    buckets_[hour][i] += n;
    while (buckets_.size() > kRetainedBuckets) buckets_.erase(buckets_.begin());
}

std::uint64_t AggregateStats::total(Counter c) const {
    return totals_[static_cast<std::size_t>(c)].load(std::memory_order_relaxed);
}

std::map<std::int64_t, std::array<std::uint64_t, AggregateStats::kCounters>> AggregateStats::buckets() const {
    std::lock_guard lock(mu_);
    return buckets_;
}

std::string AggregateStats::to_json() const {
    nlohmann::json j;
    for (std::size_t i = 0; i < kCounters; ++i)
        j["total"][std::string(name(static_cast<Counter>(i)))] = total(static_cast<Counter>(i));
    auto& hourly = j["hourly"] = nlohmann::json::array();
    for (const auto& [hour, counts] : buckets()) {
        nlohmann::json b;
        b["hour"] = hour;
        for (std::size_t i = 0; i < kCounters; ++i)
            if (counts[i] != 0) b[std::string(name(static_cast<Counter>(i)))] = counts[i];
        hourly.push_back(std::move(b));
    }
    return j.dump();
}

}  // namespace punchcard::server
