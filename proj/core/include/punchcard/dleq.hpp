#pragma once

// Chaum-Pedersen proof that log_g(pk) == log_p(p'), made non-interactive with
// Fiat-Shamir. Wire form is A1 || A2 || z.

#include <array>
#include <string_view>

#include "punchcard/bytes.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/group/group.hpp"
#include "punchcard/hash.hpp"

namespace punchcard {

/// Public statement: pk = g^x and punched = base^x for the same secret x.
template <PrimeOrderGroup G>
struct DleqStatement {
    typename G::Element g;
    typename G::Element pk;
    typename G::Element base;
    typename G::Element punched;
};

template <PrimeOrderGroup G>
struct DleqProof {
    using Element = typename G::Element;
    using Scalar = typename G::Scalar;

    static constexpr std::size_t kBytes = 2 * G::kElementBytes + Scalar::kBytes;

    Element a1;  // g^k
    Element a2;  // base^k
    Scalar z;    // k + c*x

    std::array<std::uint8_t, kBytes> serialize() const {
        std::array<std::uint8_t, kBytes> out{};
        auto e1 = G::encode(a1);
        auto e2 = G::encode(a2);
        auto zs = z.to_bytes();
        auto it = std::copy(e1.begin(), e1.end(), out.begin());
        it = std::copy(e2.begin(), e2.end(), it);
        std::copy(zs.begin(), zs.end(), it);
        return out;
    }

    static DleqProof deserialize(ByteView bytes) {
        if (bytes.size() != kBytes) throw InvalidEncoding("dleq proof: wrong length");
        ByteReader r(bytes);
        DleqProof p;
        p.a1 = G::decode(r.take(G::kElementBytes));
        p.a2 = G::decode(r.take(G::kElementBytes));
        p.z = Scalar::from_bytes(r.take(Scalar::kBytes));
        return p;
    }

    friend bool operator==(const DleqProof&, const DleqProof&) = default;
};

/// c = H(tag, g, pk, base, punched, A1, A2) reduced mod q.
template <PrimeOrderGroup G>
typename G::Scalar dleq_challenge(std::string_view tag, const DleqStatement<G>& st,
                                  const typename G::Element& a1, const typename G::Element& a2) {
    TaggedHash h(tag);
    for (const auto* e : {&st.g, &st.pk, &st.base, &st.punched, &a1, &a2}) h.update(G::encode(*e));
    auto digest = h.finalize();
    return G::Scalar::from_wide(digest);
}

template <PrimeOrderGroup G>
DleqProof<G> dleq_prove(std::string_view tag, const DleqStatement<G>& st, const typename G::Scalar& secret,
                        Rng& rng) {
    using Scalar = typename G::Scalar;
    const Scalar k = Scalar::random(rng);
    DleqProof<G> proof;
    proof.a1 = G::exp(st.g, k);
    proof.a2 = G::exp(st.base, k);
    const Scalar c = dleq_challenge<G>(tag, st, proof.a1, proof.a2);
    proof.z = k + c * secret;
    return proof;
}

/// Interactive-form check with the challenge supplied by the caller:
/// g^z == A1 * pk^c and base^z == A2 * punched^c.
template <PrimeOrderGroup G>
bool dleq_check_response(const DleqStatement<G>& st, const typename G::Element& a1,
                         const typename G::Element& a2, const typename G::Scalar& c,
                         const typename G::Scalar& z) {
    return G::exp(st.g, z) == G::mul(a1, G::exp(st.pk, c)) &&
           G::exp(st.base, z) == G::mul(a2, G::exp(st.punched, c));
}

template <PrimeOrderGroup G>
bool dleq_verify(std::string_view tag, const DleqStatement<G>& st, const DleqProof<G>& proof) {
    const auto c = dleq_challenge<G>(tag, st, proof.a1, proof.a2);
    return dleq_check_response<G>(st, proof.a1, proof.a2, c, proof.z);
}

/// Verifies a serialized proof; malformed bytes count as a reject.
template <PrimeOrderGroup G>
bool dleq_verify_bytes(std::string_view tag, const DleqStatement<G>& st, ByteView proof_bytes) {
    try {
        return dleq_verify<G>(tag, st, DleqProof<G>::deserialize(proof_bytes));
    } catch (const InvalidEncoding&) {
        return false;
    }
}

/// Honest-verifier simulator: given a challenge chosen in advance, produces a
/// transcript (A1, A2, z) without the witness.
template <PrimeOrderGroup G>
DleqProof<G> dleq_simulate(const DleqStatement<G>& st, const typename G::Scalar& c, Rng& rng) {
    using Scalar = typename G::Scalar;
    DleqProof<G> p;
    p.z = Scalar::random(rng);
    const Scalar neg_c = -c;
    p.a1 = G::mul(G::exp(st.g, p.z), G::exp(st.pk, neg_c));
    p.a2 = G::mul(G::exp(st.base, p.z), G::exp(st.punched, neg_c));
    return p;
}

}  // namespace punchcard
