#pragma once

// Expiring cards: u = expiry (4 bytes, big-endian days since 1970-01-01) ||
// 28 random bytes. Expiry dates are restricted to period boundaries so the
// date itself carries little information about the holder.

#include <chrono>
#include <cstdint>
#include <string_view>

#include "punchcard/punchcard.hpp"

namespace punchcard {

using Date = std::chrono::sys_days;

enum class ExpiryGranularity : std::uint8_t { Month, Quarter, Year };

struct ExpiryPolicy {
    ExpiryGranularity granularity = ExpiryGranularity::Quarter;
    /// Latest acceptable expiry, in periods after the start of the current one.
    std::uint32_t horizon_periods = 8;
};

ExpiryGranularity parse_granularity(std::string_view name);
std::string_view to_string(ExpiryGranularity g);

Date period_start(Date d, ExpiryGranularity g);
Date add_periods(Date boundary, std::int64_t periods, ExpiryGranularity g);
bool is_boundary(Date d, ExpiryGranularity g);
/// Furthest expiry a server will accept today.
Date max_expiry(Date today, const ExpiryPolicy& policy);

Date today_utc();
Date parse_date(std::string_view iso);  // YYYY-MM-DD
std::string format_date(Date d);

/// Builds u for an expiring card; throws BadExpiry for off-boundary or
/// beyond-horizon dates and for dates already past.
Secret32 make_expiring_secret(Date expiry, Date today, const ExpiryPolicy& policy, Rng& rng);
Date secret_expiry(const Secret32& u);

enum class ExpiryStatus { Valid, Expired, TooFarOrMalformed };
ExpiryStatus check_expiry(const Secret32& u, Date today, const ExpiryPolicy& policy);

template <HashableGroup G>
std::pair<CardSecret<G>, PunchCard<G>> issue_expiring(Rng& rng, Date expiry, Date today,
                                                      const ExpiryPolicy& policy = {}) {
    return issue_with_secret<G>(make_expiring_secret(expiry, today, policy, rng), rng);
}

/// Expiry check first, then the standard verification.
template <HashableGroup G>
VerifyOutcome verify_expiring(const ServerKeys<G>& keys, RedeemDb& db, const RedeemRequest<G>& req, std::uint64_t n,
                              Date today, const ExpiryPolicy& policy,
                              SkPowerCache<typename G::Scalar>* cache = nullptr) {
    switch (check_expiry(req.u, today, policy)) {
        case ExpiryStatus::Expired: return VerifyOutcome::Expired;
        case ExpiryStatus::TooFarOrMalformed: return VerifyOutcome::BadCard;
        case ExpiryStatus::Valid: break;
    }
    return server_verify<G>(keys, db, req, n, cache);
}

/// Drops spent secrets whose embedded expiry is before `today`. Offline
/// maintenance: needs exclusive access to the database.
std::size_t purge_expired(RedeemDb& db, Date today);

}  // namespace punchcard
