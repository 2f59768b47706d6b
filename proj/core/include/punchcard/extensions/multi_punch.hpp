#pragma once

// Promotions worth t punches: the server returns p^sk, p^(sk^2), ..., p^(sk^t),
// each linked to its predecessor by a DLEQ proof against (g, pk). The client
// checks the whole chain and keeps only the last element.

#include <cstdint>
#include <vector>

#include "punchcard/punchcard.hpp"

namespace punchcard {

inline constexpr std::uint32_t kDefaultMaxPromotion = 10;

template <HashableGroup G>
struct MultiPunchResponse {
    /// links[i].punched = p^(sk^(i+1)); links[i].proof relates it to the previous element.
    std::vector<PunchResponse<G>> links;

    /// t (1 byte) || t x (element || proof).
    Bytes serialize() const {
        Bytes out;
        out.reserve(1 + links.size() * PunchResponse<G>::kBytes);
        out.push_back(static_cast<std::uint8_t>(links.size()));
        for (const auto& link : links) append_to(out, link.serialize());
        return out;
    }

    static MultiPunchResponse deserialize(ByteView bytes) {
        ByteReader r(bytes);
        const std::uint8_t t = r.u8();
        if (t == 0) throw InvalidEncoding("multi-punch response: empty chain");
        MultiPunchResponse resp;
        resp.links.reserve(t);
        for (std::uint8_t i = 0; i < t; ++i)
            resp.links.push_back(PunchResponse<G>::deserialize(r.take(PunchResponse<G>::kBytes)));
        r.expect_done();
        return resp;
    }
};

template <HashableGroup G>
MultiPunchResponse<G> server_multi_punch(const ServerKeys<G>& keys, const typename G::Element& p, std::uint32_t t,
                                         Rng& rng, std::uint32_t t_max = kDefaultMaxPromotion) {
    if (t == 0 || t > t_max || t > 255)
        throw PromotionTooLarge("promotion of " + std::to_string(t) + " punches outside [1, " +
                                std::to_string(t_max) + "]");
    MultiPunchResponse<G> resp;
    resp.links.reserve(t);
    typename G::Element prev = p;
    for (std::uint32_t i = 0; i < t; ++i) {
        resp.links.push_back(server_punch<G>(keys, prev, rng));
        prev = resp.links.back().punched;
    }
    return resp;
}

template <HashableGroup G>
bool verify_multi_punch(const typename G::Element& pk, const typename G::Element& sent,
                        const MultiPunchResponse<G>& resp, std::uint32_t t) {
    if (resp.links.size() != t || t == 0) return false;
    typename G::Element prev = sent;
    for (const auto& link : resp.links) {
        if (!verify_punch<G>(pk, prev, link)) return false;
        prev = link.punched;
    }
    return true;
}

/// Verifies every link, then adopts p^(sk^t) re-masked. Throws ProofRejected.
template <HashableGroup G>
std::pair<CardSecret<G>, PunchCard<G>> client_multi_punch(const typename G::Element& pk, const CardSecret<G>& secret,
                                                          const PunchCard<G>& sent, const MultiPunchResponse<G>& resp,
                                                          std::uint32_t t, Rng& rng) {
    if (!verify_multi_punch<G>(pk, sent.p, resp, t)) throw ProofRejected("multi-punch chain rejected");
    return remask<G>(secret, resp.links.back().punched, rng);
}

}  // namespace punchcard
