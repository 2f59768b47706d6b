#pragma once

// Mergeable punch cards over an asymmetric pairing. Each card is a pair of
// main-scheme cards, one per source group, sharing the secret u and the
// server exponent sk. Redemption pairs card A's G0 half with card B's G1
// half, so only the total punch count i + j is visible to the server:
//
//   e(H0(uA)^(sk^i), H1(uB)^(sk^j)) = e(H0(uA)^(sk^(i+j)), H1(uB))

#include <array>
#include <cstdint>
#include <utility>

#include "punchcard/bytes.hpp"
#include "punchcard/dleq.hpp"
#include "punchcard/group/group.hpp"
#include "punchcard/punchcard.hpp"

namespace punchcard {

template <PairingGroups P>
struct MergeServerKeys {
    typename P::Scalar sk;
    typename P::G0::Element pk0;
    typename P::G1::Element pk1;

    static constexpr std::size_t kPublicBytes = P::G0::kElementBytes + P::G1::kElementBytes;

    static MergeServerKeys from_secret(const typename P::Scalar& sk) {
        return {sk, P::G0::exp(P::G0::generator(), sk), P::G1::exp(P::G1::generator(), sk)};
    }
    static MergeServerKeys generate(Rng& rng) { return from_secret(random_nonzero<typename P::Scalar>(rng)); }

    Bytes public_key_bytes() const {
        Bytes out;
        out.reserve(kPublicBytes);
        append_to(out, P::G0::encode(pk0));
        append_to(out, P::G1::encode(pk1));
        return out;
    }
};

/// Public half of MergeServerKeys as a client sees it.
template <PairingGroups P>
struct MergePublicKey {
    typename P::G0::Element pk0;
    typename P::G1::Element pk1;

    static MergePublicKey deserialize(ByteView bytes) {
        if (bytes.size() != MergeServerKeys<P>::kPublicBytes) throw InvalidEncoding("merge pk: wrong length");
        return {P::G0::decode(bytes.first(P::G0::kElementBytes)),
                P::G1::decode(bytes.subspan(P::G0::kElementBytes))};
    }
    static MergePublicKey of(const MergeServerKeys<P>& keys) { return {keys.pk0, keys.pk1}; }
};

template <PairingGroups P>
struct MergeCardSecret {
    Secret32 u{};
    typename P::Scalar m0 = P::Scalar::one();
    typename P::Scalar m1 = P::Scalar::one();

    friend bool operator==(const MergeCardSecret&, const MergeCardSecret&) = default;
};

template <PairingGroups P>
struct MergeCard {
    typename P::G0::Element p0;
    typename P::G1::Element p1;

    static constexpr std::size_t kBytes = P::G0::kElementBytes + P::G1::kElementBytes;

    Bytes serialize() const {
        Bytes out;
        out.reserve(kBytes);
        append_to(out, P::G0::encode(p0));
        append_to(out, P::G1::encode(p1));
        return out;
    }
    static MergeCard deserialize(ByteView bytes) {
        if (bytes.size() != kBytes) throw InvalidEncoding("merge card: wrong length");
        return {P::G0::decode(bytes.first(P::G0::kElementBytes)), P::G1::decode(bytes.subspan(P::G0::kElementBytes))};
    }

    friend bool operator==(const MergeCard&, const MergeCard&) = default;
};

template <PairingGroups P>
struct MergePunchResponse {
    typename P::G0::Element punched0;
    typename P::G1::Element punched1;
    DleqProof<typename P::G0> proof0;
    DleqProof<typename P::G1> proof1;

    static constexpr std::size_t kBytes = P::G0::kElementBytes + P::G1::kElementBytes +
                                          DleqProof<typename P::G0>::kBytes + DleqProof<typename P::G1>::kBytes;

    Bytes serialize() const {
        Bytes out;
        out.reserve(kBytes);
        append_to(out, P::G0::encode(punched0));
        append_to(out, P::G1::encode(punched1));
        append_to(out, proof0.serialize());
        append_to(out, proof1.serialize());
        return out;
    }
    static MergePunchResponse deserialize(ByteView bytes) {
        if (bytes.size() != kBytes) throw InvalidEncoding("merge punch response: wrong length");
        ByteReader r(bytes);
        MergePunchResponse resp;
        resp.punched0 = P::G0::decode(r.take(P::G0::kElementBytes));
        resp.punched1 = P::G1::decode(r.take(P::G1::kElementBytes));
        resp.proof0 = DleqProof<typename P::G0>::deserialize(r.take(DleqProof<typename P::G0>::kBytes));
        resp.proof1 = DleqProof<typename P::G1>::deserialize(r.take(DleqProof<typename P::G1>::kBytes));
        return resp;
    }
};

template <PairingGroups P>
struct MergeRedeemRequest {
    Secret32 u{};
    Secret32 u_other{};
    typename P::GT::Element merged;

    static constexpr std::size_t kBytes = 64 + P::GT::kElementBytes;

    Bytes serialize() const {
        Bytes out;
        out.reserve(kBytes);
        append_to(out, u);
        append_to(out, u_other);
        append_to(out, P::GT::encode(merged));
        return out;
    }
    static MergeRedeemRequest deserialize(ByteView bytes) {
        if (bytes.size() != kBytes) throw InvalidEncoding("merge redeem request: wrong length");
        ByteReader r(bytes);
        MergeRedeemRequest req;
        req.u = r.take_array<32>();
        req.u_other = r.take_array<32>();
        req.merged = P::GT::decode(r.take(P::GT::kElementBytes));
        return req;
    }
};

/// Client state for one mergeable card. At rest: u || m0 || m1 || p0 || p1 || punches (u32 LE).
template <PairingGroups P>
struct MergeCardState {
    MergeCardSecret<P> secret;
    MergeCard<P> card;
    std::uint32_t punches = 0;

    static constexpr std::size_t kBytes = 32 + 2 * P::Scalar::kBytes + MergeCard<P>::kBytes + 4;

    Bytes serialize() const {
        Bytes out;
        out.reserve(kBytes);
        append_to(out, secret.u);
        append_to(out, secret.m0.to_bytes());
        append_to(out, secret.m1.to_bytes());
        append_to(out, card.serialize());
        put_u32_le(out, punches);
        return out;
    }
    static MergeCardState deserialize(ByteView bytes) {
        if (bytes.size() != kBytes) throw InvalidEncoding("merge card state: wrong length");
        ByteReader r(bytes);
        MergeCardState st;
        st.secret.u = r.take_array<32>();
        st.secret.m0 = P::Scalar::from_bytes(r.take(P::Scalar::kBytes));
        st.secret.m1 = P::Scalar::from_bytes(r.take(P::Scalar::kBytes));
        if (st.secret.m0.is_zero() || st.secret.m1.is_zero()) throw InvalidEncoding("merge card state: zero mask");
        st.card = MergeCard<P>::deserialize(r.take(MergeCard<P>::kBytes));
        st.punches = r.u32_le();
        return st;
    }
};

template <PairingGroups P>
typename P::G0::Element merge_base0(const Secret32& u) {
    return P::G0::hash_to_group(tags::kHashMergeG0, u);
}

template <PairingGroups P>
typename P::G1::Element merge_base1(const Secret32& u) {
    return P::G1::hash_to_group(tags::kHashMergeG1, u);
}

template <PairingGroups P>
std::pair<MergeServerKeys<P>, RedeemDb> merge_server_setup(Rng& rng) {
    return {MergeServerKeys<P>::generate(rng), RedeemDb::in_memory()};
}

template <PairingGroups P>
std::pair<MergeCardSecret<P>, MergeCard<P>> merge_issue_with_secret(const Secret32& u, Rng& rng) {
    MergeCardSecret<P> secret{u, random_nonzero<typename P::Scalar>(rng), random_nonzero<typename P::Scalar>(rng)};
    MergeCard<P> card{P::G0::exp(merge_base0<P>(u), secret.m0), P::G1::exp(merge_base1<P>(u), secret.m1)};
    return {secret, card};
}

template <PairingGroups P>
std::pair<MergeCardSecret<P>, MergeCard<P>> merge_issue(Rng& rng) {
    return merge_issue_with_secret<P>(rng.bytes<32>(), rng);
}

template <PairingGroups P>
MergePunchResponse<P> merge_server_punch(const MergeServerKeys<P>& keys, const MergeCard<P>& card, Rng& rng) {
    using G0 = typename P::G0;
    using G1 = typename P::G1;
    MergePunchResponse<P> resp;
    resp.punched0 = G0::exp(card.p0, keys.sk);
    resp.punched1 = G1::exp(card.p1, keys.sk);
    resp.proof0 = dleq_prove<G0>(tags::kDleqG0, DleqStatement<G0>{G0::generator(), keys.pk0, card.p0, resp.punched0},
                                 keys.sk, rng);
    resp.proof1 = dleq_prove<G1>(tags::kDleqG1, DleqStatement<G1>{G1::generator(), keys.pk1, card.p1, resp.punched1},
                                 keys.sk, rng);
    return resp;
}

template <PairingGroups P>
bool merge_verify_punch(const MergePublicKey<P>& pk, const MergeCard<P>& sent, const MergePunchResponse<P>& resp) {
    using G0 = typename P::G0;
    using G1 = typename P::G1;
    return dleq_verify<G0>(tags::kDleqG0, DleqStatement<G0>{G0::generator(), pk.pk0, sent.p0, resp.punched0},
                           resp.proof0) &&
           dleq_verify<G1>(tags::kDleqG1, DleqStatement<G1>{G1::generator(), pk.pk1, sent.p1, resp.punched1},
                           resp.proof1);
}

/// All-or-nothing: throws ProofRejected if either proof fails.
template <PairingGroups P>
std::pair<MergeCardSecret<P>, MergeCard<P>> merge_client_punch(const MergePublicKey<P>& pk,
                                                              const MergeCardSecret<P>& secret,
                                                              const MergeCard<P>& sent,
                                                              const MergePunchResponse<P>& resp, Rng& rng) {
    if (!merge_verify_punch<P>(pk, sent, resp)) throw ProofRejected();
    MergeCardSecret<P> next{secret.u, random_nonzero<typename P::Scalar>(rng), random_nonzero<typename P::Scalar>(rng)};
    MergeCard<P> card{P::G0::exp(resp.punched0, next.m0 * secret.m0.inverse()),
                      P::G1::exp(resp.punched1, next.m1 * secret.m1.inverse())};
    return {next, card};
}

/// p'' = e(pA0^(1/mA0), pB1^(1/mB1)); reveals (uA, uB) and p''.
template <PairingGroups P>
MergeRedeemRequest<P> client_merge_redeem(const MergeCardSecret<P>& secret_a, const MergeCard<P>& card_a,
                                          const MergeCardSecret<P>& secret_b, const MergeCard<P>& card_b) {
    MergeRedeemRequest<P> req;
    req.u = secret_a.u;
    req.u_other = secret_b.u;
    req.merged = P::pair(P::G0::exp(card_a.p0, secret_a.m0.inverse()), P::G1::exp(card_b.p1, secret_b.m1.inverse()));
    return req;
}

template <PairingGroups P>
bool merge_request_valid(const typename P::Scalar& sk_pow_n, const MergeRedeemRequest<P>& req) {
    return P::pair(P::G0::exp(merge_base0<P>(req.u), sk_pow_n), merge_base1<P>(req.u_other)) == req.merged;
}

/// Accepts iff u != u', the pairing equation holds for n, and neither secret
/// is spent; both are inserted together or not at all.
template <PairingGroups P>
VerifyOutcome merge_server_verify(const MergeServerKeys<P>& keys, RedeemDb& db, const MergeRedeemRequest<P>& req,
                                  std::uint64_t n, SkPowerCache<typename P::Scalar>* cache = nullptr) {
    if (req.u == req.u_other) return VerifyOutcome::BadCard;
    const auto exponent = cache != nullptr ? cache->get(n) : pow_int(keys.sk, n);
    if (!merge_request_valid<P>(exponent, req)) return VerifyOutcome::BadCard;
    const std::array<Secret32, 2> both{req.u, req.u_other};
    return db.check_and_insert(both) == InsertResult::Inserted ? VerifyOutcome::Accepted : VerifyOutcome::DoubleSpend;
}

template <PairingGroups P>
class MergePunchServer {
public:
    explicit MergePunchServer(MergeServerKeys<P> keys) : keys_(std::move(keys)), cache_(keys_.sk) {}

    const MergeServerKeys<P>& keys() const { return keys_; }
    MergePunchResponse<P> punch(const MergeCard<P>& card, Rng& rng) const {
        return merge_server_punch<P>(keys_, card, rng);
    }
    VerifyOutcome verify(RedeemDb& db, const MergeRedeemRequest<P>& req, std::uint64_t n) {
        return merge_server_verify<P>(keys_, db, req, n, &cache_);
    }

private:
    MergeServerKeys<P> keys_;
    SkPowerCache<typename P::Scalar> cache_;
};

}  // namespace punchcard
