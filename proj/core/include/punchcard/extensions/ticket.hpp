#pragma once

// One-time tickets with attributes. Each named slot gets its own base
// H("punchcard/ticket/v1/<slot>", u) and is punched as many times as the
// attribute value (e.g. class = 1, zone = 3). Redemption reveals u and every
// unmasked slot.

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "punchcard/extensions/multi_punch.hpp"

namespace punchcard {

inline std::string ticket_slot_tag(std::string_view slot) { return std::string(tags::kTicketPrefix) + std::string(slot); }

template <HashableGroup G>
typename G::Element ticket_slot_base(std::string_view slot, const Secret32& u) {
    return G::hash_to_group(ticket_slot_tag(slot), u);
}

template <HashableGroup G>
struct Ticket {
    Secret32 u{};
    std::vector<std::string> slots;
    std::vector<typename G::Scalar> masks;
    std::vector<typename G::Element> cards;  // masked slot states, sent for punching
};

template <HashableGroup G>
Ticket<G> issue_ticket(const std::vector<std::string>& slots, Rng& rng) {
    if (std::set<std::string>(slots.begin(), slots.end()).size() != slots.size())
        throw std::invalid_argument("ticket slot names must be distinct");
    Ticket<G> t;
    t.u = rng.bytes<32>();
    t.slots = slots;
    for (const auto& slot : slots) {
        t.masks.push_back(random_nonzero<typename G::Scalar>(rng));
        t.cards.push_back(G::exp(ticket_slot_base<G>(slot, t.u), t.masks.back()));
    }
    return t;
}

/// One response per slot; slots with value 0 get no response (empty chain).
template <HashableGroup G>
std::vector<MultiPunchResponse<G>> server_ticket_punch(const ServerKeys<G>& keys,
                                                       const std::vector<typename G::Element>& cards,
                                                       const std::vector<std::uint32_t>& values, Rng& rng,
                                                       std::uint32_t t_max = kDefaultMaxPromotion) {
    if (cards.size() != values.size()) throw std::invalid_argument("one value per ticket slot");
    std::vector<MultiPunchResponse<G>> out(cards.size());
    for (std::size_t i = 0; i < cards.size(); ++i)
        if (values[i] > 0) out[i] = server_multi_punch<G>(keys, cards[i], values[i], rng, t_max);
    return out;
}

/// Verifies every slot chain and re-masks. Throws ProofRejected; `ticket` is untouched on failure.
template <HashableGroup G>
Ticket<G> client_ticket_punch(const typename G::Element& pk, const Ticket<G>& ticket,
                              const std::vector<MultiPunchResponse<G>>& responses,
                              const std::vector<std::uint32_t>& values, Rng& rng) {
    if (responses.size() != ticket.slots.size() || values.size() != ticket.slots.size())
        throw ProofRejected("ticket response does not match slots");
    Ticket<G> next = ticket;
    for (std::size_t i = 0; i < ticket.slots.size(); ++i) {
        if (values[i] == 0) {
            if (!responses[i].links.empty()) throw ProofRejected("unexpected punch on zero-valued slot");
            continue;
        }
        auto [secret, card] = client_multi_punch<G>(pk, CardSecret<G>{ticket.u, ticket.masks[i]},
                                                    PunchCard<G>{ticket.cards[i]}, responses[i], values[i], rng);
        next.masks[i] = secret.m;
        next.cards[i] = card.p;
    }
    return next;
}

template <HashableGroup G>
struct TicketRedemption {
    Secret32 u{};
    std::vector<std::pair<std::string, typename G::Element>> slots;
};

template <HashableGroup G>
TicketRedemption<G> redeem_ticket(const Ticket<G>& ticket) {
    TicketRedemption<G> r;
    r.u = ticket.u;
    for (std::size_t i = 0; i < ticket.slots.size(); ++i)
        r.slots.emplace_back(ticket.slots[i], G::exp(ticket.cards[i], ticket.masks[i].inverse()));
    return r;
}

/// Accepts iff every claimed slot value matches and u is unspent.
template <HashableGroup G>
VerifyOutcome verify_ticket(const ServerKeys<G>& keys, RedeemDb& db, const TicketRedemption<G>& redemption,
                            const std::vector<std::pair<std::string, std::uint32_t>>& claimed,
                            SkPowerCache<typename G::Scalar>* cache = nullptr) {
    if (claimed.size() != redemption.slots.size()) return VerifyOutcome::BadCard;
    for (std::size_t i = 0; i < claimed.size(); ++i) {
        const auto& [name, element] = redemption.slots[i];
        if (name != claimed[i].first) return VerifyOutcome::BadCard;
        const auto exponent = cache != nullptr ? cache->get(claimed[i].second) : pow_int(keys.sk, claimed[i].second);
        if (G::exp(ticket_slot_base<G>(name, redemption.u), exponent) != element) return VerifyOutcome::BadCard;
    }
    return db.check_and_insert(redemption.u) == InsertResult::Inserted ? VerifyOutcome::Accepted
                                                                      : VerifyOutcome::DoubleSpend;
}

}  // namespace punchcard
