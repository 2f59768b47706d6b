#include "punchcard/extensions/expiry.hpp"

#include <cstdio>
#include <string>

namespace punchcard {

using namespace std::chrono;

namespace {

unsigned months_per_period(ExpiryGranularity g) {
    switch (g) {
        case ExpiryGranularity::Month: return 1;
        case ExpiryGranularity::Quarter: return 3;
        case ExpiryGranularity::Year: return 12;
    }
    return 1;
}

}  // namespace

ExpiryGranularity parse_granularity(std::string_view name) {
    if (name == "month") return ExpiryGranularity::Month;
    if (name == "quarter") return ExpiryGranularity::Quarter;
    if (name == "year") return ExpiryGranularity::Year;
    throw std::invalid_argument("unknown expiry granularity: " + std::string(name));
}

std::string_view to_string(ExpiryGranularity g) {
    switch (g) {
        case ExpiryGranularity::Month: return "month";
        case ExpiryGranularity::Quarter: return "quarter";
        case ExpiryGranularity::Year: return "year";
    }
    return "?";
}

Date period_start(Date d, ExpiryGranularity g) {
    const year_month_day ymd{d};
    const unsigned per = months_per_period(g);
    const unsigned m0 = (static_cast<unsigned>(ymd.month()) - 1) / per * per;
    return sys_days{ymd.year() / month{m0 + 1} / day{1}};
}

Date add_periods(Date boundary, std::int64_t periods, ExpiryGranularity g) {
    const year_month_day ymd{boundary};
    return sys_days{year_month_day{ymd.year() / ymd.month() / day{1}} +
                    months{periods * static_cast<std::int64_t>(months_per_period(g))}};
}

bool is_boundary(Date d, ExpiryGranularity g) { return period_start(d, g) == d; }

Date max_expiry(Date today, const ExpiryPolicy& policy) {
    return add_periods(period_start(today, policy.granularity), policy.horizon_periods, policy.granularity);
}

Date today_utc() { return floor<days>(system_clock::now()); }

Date parse_date(std::string_view iso) {
    int y = 0;
    unsigned m = 0, d = 0;
    std::string s(iso);
    char tail = 0;
    if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3)
        throw BadExpiry("date must be YYYY-MM-DD: " + s);
    year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) throw BadExpiry("invalid calendar date: " + s);
    return sys_days{ymd};
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Secret32 make_expiring_secret(Date expiry, Date today, const ExpiryPolicy& policy, Rng& rng) {
    if (!is_boundary(expiry, policy.granularity))
        throw BadExpiry("expiry " + format_date(expiry) + " is not on a " +
                        std::string(to_string(policy.granularity)) + " boundary");
    if (expiry > max_expiry(today, policy))
        throw BadExpiry("expiry " + format_date(expiry) + " beyond horizon " + format_date(max_expiry(today, policy)));
    if (expiry < today) throw BadExpiry("expiry " + format_date(expiry) + " already passed");
    const auto days_since_epoch = expiry.time_since_epoch().count();
    if (days_since_epoch < 0) throw BadExpiry("expiry before 1970");
    const auto code = static_cast<std::uint32_t>(days_since_epoch);

    Secret32 u{};
    u[0] = static_cast<std::uint8_t>(code >> 24);
    u[1] = static_cast<std::uint8_t>(code >> 16);
    u[2] = static_cast<std::uint8_t>(code >> 8);
    u[3] = static_cast<std::uint8_t>(code);
    rng.fill(std::span(u).subspan(4));
    return u;
}

Date secret_expiry(const Secret32& u) {
    const std::uint32_t code = (std::uint32_t{u[0]} << 24) | (std::uint32_t{u[1]} << 16) |
                               (std::uint32_t{u[2]} << 8) | std::uint32_t{u[3]};
    return Date{days{static_cast<std::int64_t>(code)}};
}

ExpiryStatus check_expiry(const Secret32& u, Date today, const ExpiryPolicy& policy) {
    const Date expiry = secret_expiry(u);
    if (expiry < today) return ExpiryStatus::Expired;
    if (!is_boundary(expiry, policy.granularity) || expiry > max_expiry(today, policy))
        return ExpiryStatus::TooFarOrMalformed;
    return ExpiryStatus::Valid;
}

std::size_t purge_expired(RedeemDb& db, Date today) {
    return db.purge_if([today](const Secret32& u) { return secret_expiry(u) < today; });
}

}  // namespace punchcard
