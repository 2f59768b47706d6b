#pragma once

// Provable redemption: u = H_rs(rs) for a client-held redemption secret rs.
// Redemption takes two flows. The server checks (u, p) and asks for rs; the
// client reveals it and the server stores (u, rs). If the same card shows up
// again the server can hand back rs, which only someone who saw the original
// redemption can know.

#include <filesystem>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "punchcard/punchcard.hpp"
#include "punchcard/storage.hpp"

namespace punchcard {

Secret32 derive_card_secret(const Secret32& rs);

/// Client-side check of a server's claim that the card was already redeemed.
bool confirm_prior_redemption(const Secret32& u, const Secret32& rs);

template <HashableGroup G>
struct ProvableCard {
    Secret32 rs{};
    CardSecret<G> secret;
    PunchCard<G> card;
};

template <HashableGroup G>
ProvableCard<G> issue_with_redemption_proof(Rng& rng) {
    ProvableCard<G> out;
    out.rs = rng.bytes<32>();
    std::tie(out.secret, out.card) = issue_with_secret<G>(derive_card_secret(out.rs), rng);
    return out;
}

/// Persistent u -> rs map (optional; in-memory if no path is given).
class RedemptionRegistry {
public:
    RedemptionRegistry() = default;
    explicit RedemptionRegistry(const std::filesystem::path& path, bool sync = true);

    void record(const Secret32& u, const Secret32& rs);
    std::optional<Secret32> lookup(const Secret32& u) const;
    std::size_t size() const;

private:
    struct SecretKeyHash {
        std::size_t operator()(const Secret32& s) const;
    };
    mutable std::mutex mu_;
    std::unordered_map<Secret32, Secret32, SecretKeyHash> map_;
    AppendLog log_;
};

template <HashableGroup G>
class ProvableRedemptionServer {
public:
    struct Begin {
        /// Accepted means "card valid, send rs"; DoubleSpend may carry the stored rs.
        VerifyOutcome outcome = VerifyOutcome::BadCard;
        std::optional<Secret32> prior_rs;
    };

    ProvableRedemptionServer(PunchServer<G>& server, RedeemDb& db, RedemptionRegistry& registry)
        : server_(server), db_(db), registry_(registry) {}

    Begin begin(const RedeemRequest<G>& req, std::uint64_t n) {
        if (!redeem_request_valid<G>(server_.cache().get(n), req)) return {VerifyOutcome::BadCard, std::nullopt};
        if (db_.contains(req.u)) return {VerifyOutcome::DoubleSpend, registry_.lookup(req.u)};
        std::lock_guard lock(mu_);
        pending_.insert(req.u);
        return {VerifyOutcome::Accepted, std::nullopt};
    }

    VerifyOutcome finish(const Secret32& u, const Secret32& rs) {
        {
            std::lock_guard lock(mu_);
            if (!pending_.contains(u)) return VerifyOutcome::BadCard;
            if (derive_card_secret(rs) != u) return VerifyOutcome::BadCard;
            pending_.erase(u);
        }
        if (db_.check_and_insert(u) != InsertResult::Inserted) return VerifyOutcome::DoubleSpend;
        registry_.record(u, rs);
        return VerifyOutcome::Accepted;
    }

    /// Throws NoSuchRedemption if no redemption of u was ever completed.
    Secret32 prove_prior_redemption(const Secret32& u) const {
        if (auto rs = registry_.lookup(u)) return *rs;
        throw NoSuchRedemption();
    }

private:
    struct PendingHash {
        std::size_t operator()(const Secret32& s) const { return get_u64_le(s.data()); }
    };

    PunchServer<G>& server_;
    RedeemDb& db_;
    RedemptionRegistry& registry_;
    std::mutex mu_;
    std::unordered_set<Secret32, PendingHash> pending_;
};

}  // namespace punchcard
