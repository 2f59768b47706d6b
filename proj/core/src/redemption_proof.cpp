#include "punchcard/extensions/redemption_proof.hpp"

#include <sodium.h>

namespace punchcard {

Secret32 derive_card_secret(const Secret32& rs) {
    auto digest = tagged_hash(tags::kRedemptionSecret, rs);
    Secret32 u{};
    std::copy_n(digest.begin(), u.size(), u.begin());
    return u;
}

bool confirm_prior_redemption(const Secret32& u, const Secret32& rs) {
    const Secret32 derived = derive_card_secret(rs);
    return sodium_memcmp(derived.data(), u.data(), u.size()) == 0;
}

std::size_t RedemptionRegistry::SecretKeyHash::operator()(const Secret32& s) const {
    // Keys are hash outputs, already uniform.
    return static_cast<std::size_t>(get_u64_le(s.data()));
}

RedemptionRegistry::RedemptionRegistry(const std::filesystem::path& path, bool sync) {
    log_ = AppendLog(
        path, "PCRS", 1,
        [this](ByteView payload) {
            ByteReader r(payload);
            auto u = r.take_array<32>();
            auto rs = r.take_array<32>();
            r.expect_done();
            map_[u] = rs;
        },
        AppendLog::Options{sync, nullptr, "registry.append"});
}

void RedemptionRegistry::record(const Secret32& u, const Secret32& rs) {
    std::lock_guard lock(mu_);
    if (log_.is_open()) {
        Bytes rec;
        append_to(rec, u);
        append_to(rec, rs);
        log_.append(rec);
    }
    map_[u] = rs;
}

std::optional<Secret32> RedemptionRegistry::lookup(const Secret32& u) const {
    std::lock_guard lock(mu_);
    auto it = map_.find(u);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

std::size_t RedemptionRegistry::size() const {
    std::lock_guard lock(mu_);
    return map_.size();
}

}  // namespace punchcard
