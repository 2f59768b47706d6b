#pragma once

// Main punch card construction over any hashable prime-order group.
//
//   server_setup    sk <- Z_q, pk = g^sk, empty DB
//   issue           u <- {0,1}^256, m <- Z_q*, p = H(u)^m          (client only)
//   server_punch    p' = p^sk plus a DLEQ proof for (g, pk, p, p')
//   client_punch    verify proof, m' <- Z_q*, p'' = p'^(m'/m)
//   client_redeem   (u, p^(1/m))
//   server_verify   accept iff p == H(u)^(sk^n) and u unspent; insert u

#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <utility>

#include "punchcard/bytes.hpp"
#include "punchcard/dleq.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/group/group.hpp"
#include "punchcard/hash.hpp"
#include "punchcard/redeem_db.hpp"

namespace punchcard {

/// Result of a redemption check. Numeric values are the REDEEM_RESP status byte.
enum class VerifyOutcome : std::uint8_t {
    Accepted = 0,
    BadCard = 1,
    DoubleSpend = 2,
    Expired = 3,
};

std::string_view to_string(VerifyOutcome outcome);

template <HashableGroup G>
struct ServerKeys {
    typename G::Scalar sk;
    typename G::Element pk;

    static ServerKeys from_secret(const typename G::Scalar& sk) { return {sk, G::exp(G::generator(), sk)}; }
    static ServerKeys generate(Rng& rng) { return from_secret(random_nonzero<typename G::Scalar>(rng)); }

    std::array<std::uint8_t, G::kElementBytes> public_key_bytes() const { return G::encode(pk); }
};

template <HashableGroup G>
struct CardSecret {
    Secret32 u{};
    typename G::Scalar m = G::Scalar::one();

    friend bool operator==(const CardSecret&, const CardSecret&) = default;
};

template <HashableGroup G>
struct PunchCard {
    typename G::Element p;

    static constexpr std::size_t kBytes = G::kElementBytes;
    std::array<std::uint8_t, kBytes> serialize() const { return G::encode(p); }
    static PunchCard deserialize(ByteView bytes) { return {G::decode(bytes)}; }

    friend bool operator==(const PunchCard&, const PunchCard&) = default;
};

template <HashableGroup G>
struct PunchResponse {
    typename G::Element punched;
    DleqProof<G> proof;

    static constexpr std::size_t kBytes = G::kElementBytes + DleqProof<G>::kBytes;

    Bytes serialize() const {
        Bytes out;
        out.reserve(kBytes);
        append_to(out, G::encode(punched));
        append_to(out, proof.serialize());
        return out;
    }
    static PunchResponse deserialize(ByteView bytes) {
        if (bytes.size() != kBytes) throw InvalidEncoding("punch response: wrong length");
        return {G::decode(bytes.first(G::kElementBytes)), DleqProof<G>::deserialize(bytes.subspan(G::kElementBytes))};
    }
};

template <HashableGroup G>
struct RedeemRequest {
    Secret32 u{};
    typename G::Element p;

    static constexpr std::size_t kBytes = 32 + G::kElementBytes;

    Bytes serialize() const {
        Bytes out;
        out.reserve(kBytes);
        append_to(out, u);
        append_to(out, G::encode(p));
        return out;
    }
    static RedeemRequest deserialize(ByteView bytes) {
        if (bytes.size() != kBytes) throw InvalidEncoding("redeem request: wrong length");
        ByteReader r(bytes);
        RedeemRequest req;
        req.u = r.take_array<32>();
        req.p = G::decode(r.take(G::kElementBytes));
        return req;
    }
};

/// Everything a client keeps for one card. At rest: u || m || p || punches (u32 LE).
template <HashableGroup G>
struct CardState {
    CardSecret<G> secret;
    PunchCard<G> card;
    std::uint32_t punches = 0;

    static constexpr std::size_t kBytes = 32 + G::Scalar::kBytes + G::kElementBytes + 4;

    Bytes serialize() const {
        Bytes out;
        out.reserve(kBytes);
        append_to(out, secret.u);
        append_to(out, secret.m.to_bytes());
        append_to(out, G::encode(card.p));
        put_u32_le(out, punches);
        return out;
    }
    static CardState deserialize(ByteView bytes) {
        if (bytes.size() != kBytes) throw InvalidEncoding("card state: wrong length");
        ByteReader r(bytes);
        CardState st;
        st.secret.u = r.take_array<32>();
        st.secret.m = G::Scalar::from_bytes(r.take(G::Scalar::kBytes));
        if (st.secret.m.is_zero()) throw InvalidEncoding("card state: zero mask");
        st.card.p = G::decode(r.take(G::kElementBytes));
        st.punches = r.u32_le();
        return st;
    }
};

/// Hash-to-group and proof domain tags for the main scheme.
struct MainTags {
    static constexpr std::string_view hash = tags::kHashMain;
    static constexpr std::string_view dleq = tags::kDleq;
};

template <HashableGroup G>
typename G::Element card_base(const Secret32& u) {
    return G::hash_to_group(MainTags::hash, u);
}

template <HashableGroup G>
std::pair<ServerKeys<G>, RedeemDb> server_setup(Rng& rng) {
    return {ServerKeys<G>::generate(rng), RedeemDb::in_memory()};
}

/// Issue with a caller-provided secret (expiry-prefixed or derived secrets).
template <HashableGroup G>
std::pair<CardSecret<G>, PunchCard<G>> issue_with_secret(const Secret32& u, Rng& rng) {
    CardSecret<G> secret{u, random_nonzero<typename G::Scalar>(rng)};
    return {secret, PunchCard<G>{G::exp(card_base<G>(u), secret.m)}};
}

template <HashableGroup G>
std::pair<CardSecret<G>, PunchCard<G>> issue(Rng& rng) {
    return issue_with_secret<G>(rng.bytes<32>(), rng);
}

template <HashableGroup G>
PunchResponse<G> server_punch(const ServerKeys<G>& keys, const typename G::Element& p, Rng& rng,
                              std::string_view dleq_tag = MainTags::dleq) {
    PunchResponse<G> resp;
    resp.punched = G::exp(p, keys.sk);
    const DleqStatement<G> st{G::generator(), keys.pk, p, resp.punched};
    resp.proof = dleq_prove<G>(dleq_tag, st, keys.sk, rng);
    return resp;
}

template <HashableGroup G>
bool verify_punch(const typename G::Element& pk, const typename G::Element& sent, const PunchResponse<G>& resp,
                  std::string_view dleq_tag = MainTags::dleq) {
    const DleqStatement<G> st{G::generator(), pk, sent, resp.punched};
    return dleq_verify<G>(dleq_tag, st, resp.proof);
}

/// Re-masks an accepted punch: p'' = p'^(m'/m).
template <HashableGroup G>
std::pair<CardSecret<G>, PunchCard<G>> remask(const CardSecret<G>& secret, const typename G::Element& punched,
                                              Rng& rng) {
    const auto fresh = random_nonzero<typename G::Scalar>(rng);
    CardSecret<G> next{secret.u, fresh};
    return {next, PunchCard<G>{G::exp(punched, fresh * secret.m.inverse())}};
}

/// Throws ProofRejected if the server's proof fails; inputs are never modified.
template <HashableGroup G>
std::pair<CardSecret<G>, PunchCard<G>> client_punch(const typename G::Element& pk, const CardSecret<G>& secret,
                                                    const PunchCard<G>& sent, const PunchResponse<G>& resp,
                                                    Rng& rng) {
    if (!verify_punch<G>(pk, sent.p, resp)) throw ProofRejected();
    return remask<G>(secret, resp.punched, rng);
}

/// Same, with a response still in wire form; malformed bytes are a reject.
template <HashableGroup G>
std::pair<CardSecret<G>, PunchCard<G>> client_punch_bytes(const typename G::Element& pk,
                                                          const CardSecret<G>& secret, const PunchCard<G>& sent,
                                                          ByteView response, Rng& rng) {
    PunchResponse<G> resp;
    try {
        resp = PunchResponse<G>::deserialize(response);
    } catch (const InvalidEncoding&) {
        throw ProofRejected("punch response malformed");
    }
    return client_punch<G>(pk, secret, sent, resp, rng);
}

template <HashableGroup G>
RedeemRequest<G> client_redeem(const CardSecret<G>& secret, const PunchCard<G>& card) {
    return {secret.u, G::exp(card.p, secret.m.inverse())};
}

/// Lazily filled map n -> sk^n. Thread-safe.
template <ScalarField S>
class SkPowerCache {
public:
    explicit SkPowerCache(S sk) : sk_(std::move(sk)) {}

    S get(std::uint64_t n) {
        std::lock_guard lock(mu_);
        auto it = powers_.find(n);
        if (it != powers_.end()) return it->second;
        S value = pow_int(sk_, n);
        powers_.emplace(n, value);
        return value;
    }

    std::size_t cached() const {
        std::lock_guard lock(mu_);
        return powers_.size();
    }

private:
    S sk_;
    mutable std::mutex mu_;
    std::unordered_map<std::uint64_t, S> powers_;
};

/// The group check alone: p == H(u)^(sk^n).
template <HashableGroup G>
bool redeem_request_valid(const typename G::Scalar& sk_pow_n, const RedeemRequest<G>& req) {
    return G::exp(card_base<G>(req.u), sk_pow_n) == req.p;
}

/// Accepts iff the card carries exactly n punches under sk and u is unspent;
/// u is inserted only on accept. Storage failures propagate as StorageError.
template <HashableGroup G>
VerifyOutcome server_verify(const ServerKeys<G>& keys, RedeemDb& db, const RedeemRequest<G>& req, std::uint64_t n,
                            SkPowerCache<typename G::Scalar>* cache = nullptr) {
    const auto exponent = cache != nullptr ? cache->get(n) : pow_int(keys.sk, n);
    if (!redeem_request_valid<G>(exponent, req)) return VerifyOutcome::BadCard;
    return db.check_and_insert(req.u) == InsertResult::Inserted ? VerifyOutcome::Accepted
                                                               : VerifyOutcome::DoubleSpend;
}

/// Server-side state for the main scheme: keys plus the sk^n cache.
template <HashableGroup G>
class PunchServer {
public:
    explicit PunchServer(ServerKeys<G> keys) : keys_(std::move(keys)), cache_(keys_.sk) {}

    const ServerKeys<G>& keys() const { return keys_; }
    PunchResponse<G> punch(const typename G::Element& p, Rng& rng) const { return server_punch<G>(keys_, p, rng); }
    VerifyOutcome verify(RedeemDb& db, const RedeemRequest<G>& req, std::uint64_t n) {
        return server_verify<G>(keys_, db, req, n, &cache_);
    }
    SkPowerCache<typename G::Scalar>& cache() { return cache_; }

private:
    ServerKeys<G> keys_;
    SkPowerCache<typename G::Scalar> cache_;
};

}  // namespace punchcard
