#include "attacks.hpp"

#include <spdlog/sinks/null_sink.h>

#include "punchcard/client/wallet.hpp"
#include "punchcard/group/toy.hpp"
#include "punchcard/server/service.hpp"
#include "toy_oracle.hpp"
#include "transports.hpp"

namespace punchcard::testing {

namespace {

using G = MainGroup;
using Element = G::Element;
using Scalar = G::Scalar;

std::shared_ptr<spdlog::logger> quiet() {
    return std::make_shared<spdlog::logger>("attacks", std::make_shared<spdlog::sinks::null_sink_mt>());
}

/// Counts what the server hands out and honours, from the frames themselves.
class AccountingTransport : public Transport {
public:
    AccountingTransport(Transport& inner, Ledger& ledger) : inner_(inner), ledger_(ledger) {}

    wire::Frame roundtrip(const wire::Frame& request) override {
        auto reply = inner_.roundtrip(request);
        switch (reply.type) {
            case wire::MsgType::PunchResp:
            case wire::MsgType::MergePunchResp: ledger_.c_punch += 1; break;
            case wire::MsgType::MultiPunchResp:
                if (!reply.body.empty()) ledger_.c_punch += reply.body[0];
                break;
            case wire::MsgType::RedeemResp:
            case wire::MsgType::MergeRedeemResp:
                if (reply.body.size() == 1 && reply.body[0] == 0 && request.body.size() >= 2)
                    ledger_.c_redeem += get_u16_le(request.body.data() + request.body.size() - 2);
                break;
            default: break;
        }
        return reply;
    }

private:
    Transport& inner_;
    Ledger& ledger_;
};

/// An isolated server with every count in [1, max_n] accepted.
struct Server {
    ServerKeys<G> keys;
    server::Service service;
    server::LoopbackTransport loop;
    AccountingTransport counted;

    Server(Rng& rng, std::uint16_t max_n, Ledger& ledger)
        : keys(ServerKeys<G>::generate(rng)),
          service(config(max_n), RedeemDb::in_memory(), secret(keys), quiet()),
          loop(service),
          counted(loop, ledger) {}

    static server::ServerConfig config(std::uint16_t max_n) {
        server::ServerConfig cfg;
        cfg.scheme = Scheme::Main;
        cfg.accepted_n.clear();
        for (std::uint16_t n = 1; n <= max_n; ++n) cfg.accepted_n.push_back(n);
        return cfg;
    }
    static Secret32 secret(const ServerKeys<G>& k) {
        Secret32 out{};
        const auto b = k.sk.to_bytes();
        std::copy(b.begin(), b.end(), out.begin());
        return out;
    }

    PunchResponse<G> punch(const Element& p) {
        const auto e = G::encode(p);
        const auto reply = counted.roundtrip({wire::MsgType::PunchReq, Bytes(e.begin(), e.end())});
        return PunchResponse<G>::deserialize(expect_frame(reply, wire::MsgType::PunchResp).body);
    }

    VerifyOutcome redeem(const Secret32& u, const Element& p, std::uint16_t n) {
        return redeem_frame(wire::make_redeem_request(wire::MsgType::RedeemReq, RedeemRequest<G>{u, p}.serialize(), n));
    }
    VerifyOutcome redeem_frame(const wire::Frame& f) {
        const auto reply = counted.roundtrip(f);
        // A count the server does not honour at all is refused before any check.
        if (reply.type == wire::MsgType::Error &&
            wire::parse_error(reply).first == wire::ErrorCode::PunchCountNotAccepted)
            return VerifyOutcome::BadCard;
        const auto& body = expect_frame(reply, wire::MsgType::RedeemResp).body;
        if (body.size() != 1) throw ProtocolError("redeem reply of " + std::to_string(body.size()) + " bytes");
        return static_cast<VerifyOutcome>(body[0]);
    }
};

Secret32 bytes_of(const Element& e) {
    Secret32 out{};
    const auto enc = G::encode(e);
    std::copy(enc.begin(), enc.end(), out.begin());
    return out;
}

struct Tally {
    AttackReport& report;

    /// An adversarial attempt: anything but Accepted is the expected outcome.
    void attempt(VerifyOutcome outcome, const std::string& what) {
        ++report.attempts;
        if (outcome == VerifyOutcome::Accepted) {
            ++report.false_accepts;
            if (report.failures.size() < 20) report.failures.push_back("accepted: " + what);
        }
    }
    void attempt_punch_rejected(bool rejected, const std::string& what) {
        ++report.attempts;
        if (!rejected) {
            ++report.false_accepts;
            if (report.failures.size() < 20) report.failures.push_back("punch accepted: " + what);
        }
    }
    void honest(bool ok, const std::string& what) {
        if (!ok) {
            ++report.false_rejects;
            if (report.failures.size() < 20) report.failures.push_back("honest step failed: " + what);
        }
    }
};

/// Unmasked state H(u)^(sk^k) of a card the adversary holds.
Element unmasked(const CardSecret<G>& s, const PunchCard<G>& c) { return client_redeem<G>(s, c).p; }

}  // namespace

nlohmann::json AttackReport::to_json() const {
    return {{"scenario", scenario},     {"pass", passed()},       {"attempts", attempts},
            {"false_accepts", false_accepts}, {"false_rejects", false_rejects}, {"failures", failures},
            {"details", details}};
}

AttackReport attack_card_replay(Ledger& ledger, const AttackOptions& options) {
    AttackReport report;
    report.scenario = "card_replay";
    Tally tally{report};
    auto rng = Rng::seeded(options.seed);
    Server server(rng, options.max_n, ledger);
    const auto& pk = server.keys.pk;

    std::size_t strawman_accepts = 0;
    for (std::uint16_t n = 1; n <= options.max_n; ++n) {
        const std::string at = "n=" + std::to_string(n);
        auto [secret, card] = issue<G>(rng);
        std::vector<Element> states{unmasked(secret, card)};  // p_0 .. p_n
        for (std::uint16_t k = 0; k < n; ++k) {
            std::tie(secret, card) = client_punch<G>(pk, secret, card, server.punch(card.p), rng);
            states.push_back(unmasked(secret, card));
        }
        tally.honest(server.redeem(secret.u, states[n], n) == VerifyOutcome::Accepted, at + " honest redemption");

        // Re-punch the revealed p_n to get p_{n+1}.
        std::tie(secret, card) = client_punch<G>(pk, secret, card, server.punch(card.p), rng);
        states.push_back(unmasked(secret, card));
        const Element& p_next = states[n + 1];

        // Without the hash, (p_1, p_{n+1}) would pass p_{n+1} == p_1^(sk^n).
        const bool strawman = p_next == G::exp(states[1], pow_int(server.keys.sk, n));
        strawman_accepts += strawman;

        // With it, p_1 must be presented as some u* with H(u*) = p_1.
        tally.attempt(server.redeem(bytes_of(states[1]), p_next, n), at + " (p_1, p_{n+1}) with u* = p_1");
        tally.attempt(server.redeem(rng.bytes<32>(), p_next, n), at + " random u*, p_{n+1}");
        tally.attempt(server.redeem(secret.u, p_next, n), at + " spent u, p_{n+1}");
        tally.attempt(server.redeem(secret.u, p_next, n + 1), at + " spent u at n+1");
        for (std::size_t k = 0; k < states.size(); ++k) {
            const auto u_star = bytes_of(states[k]);
            tally.attempt(server.redeem(u_star, p_next, n), at + " intermediate p_" + std::to_string(k));
            tally.attempt(server.redeem(u_star, states[n], n), at + " intermediate p_" + std::to_string(k) + " with p_n");
        }

        // Own fresh u with a mismatched p.
        const auto own = rng.bytes<32>();
        tally.attempt(server.redeem(own, states[n], n), at + " own u, foreign p_n");
        tally.attempt(server.redeem(own, G::exp(card_base<G>(own), pow_int(server.keys.sk, n - 1)), n),
                      at + " own u, one punch short");
    }
    report.details["strawman_accepts"] = strawman_accepts;
    if (strawman_accepts != options.max_n) report.failures.push_back("unhashed control did not accept the replay");

    // Redeeming more punches than held, on toy instances checked against the oracle.
    using T = toy::ToyGroup;
    namespace orc = oracle;
    std::size_t toy_attempts = 0;
    for (std::uint64_t inst = 0; inst < 40; ++inst) {
        auto trng = Rng::seeded(options.seed * 1000 + inst);
        ServerKeys<T> keys;
        do {
            keys = ServerKeys<T>::generate(trng);
        } while (keys.sk.value() == 1 || keys.sk.value() == orc::kQ - 1);  // orders 1, 2 make sk^t periodic
        const auto sk = keys.sk.value();
        for (std::uint32_t t = 0; t <= 8; ++t) {
            auto [secret, card] = issue<T>(trng);
            while (orc::hash_exponent(tags::kHashMain, secret.u) == 0) std::tie(secret, card) = issue<T>(trng);
            for (std::uint32_t k = 0; k < t; ++k)
                std::tie(secret, card) = client_punch<T>(keys.pk, secret, card, server_punch<T>(keys, card.p, trng), trng);
            ledger.c_punch += t;
            const auto req = client_redeem<T>(secret, card);
            const auto h = orc::hash_exponent(tags::kHashMain, secret.u);
            for (std::uint32_t n = t + 1; n <= t + 5; ++n) {
                const bool oracle_accepts =
                    orc::element(orc::kGMain, orc::mulq(h, orc::powm(sk, n, orc::kQ))) == req.p.residue();
                if (oracle_accepts) report.failures.push_back("toy oracle predicts acceptance; instance degenerate");
                auto db = RedeemDb::in_memory();
                const auto outcome = server_verify<T>(keys, db, req, n);
                if (outcome == VerifyOutcome::Accepted) ledger.c_redeem += n;
                tally.attempt(outcome, "toy instance " + std::to_string(inst) + " t=" + std::to_string(t) +
                                           " n=" + std::to_string(n));
                ++toy_attempts;
            }
        }
    }
    report.details["toy_over_redemption_attempts"] = toy_attempts;
    return report;
}

AttackReport attack_key_switch(Ledger& ledger, const AttackOptions& options) {
    AttackReport report;
    report.scenario = "key_switch";
    Tally tally{report};
    auto rng = Rng::seeded(options.seed + 1);
    Server server(rng, options.max_n, ledger);
    const auto& pk = server.keys.pk;
    const auto rogue = ServerKeys<G>::generate(rng);

    auto [secret, card] = issue<G>(rng);
    const Element punched = G::exp(card.p, rogue.sk);
    auto rejected = [&](const PunchResponse<G>& resp) {
        try {
            client_punch<G>(pk, secret, card, resp, rng);
            return false;
        } catch (const ProofRejected&) {
            return true;
        }
    };

    // An honest proof, but of the rogue statement (g, pk', p, p^sk').
    tally.attempt_punch_rejected(rejected(server_punch<G>(rogue, card.p, rng)), "proof under pk'");
    // Claiming the real pk while using sk' as the witness.
    const DleqStatement<G> claimed{G::generator(), pk, card.p, punched};
    tally.attempt_punch_rejected(rejected({punched, dleq_prove<G>(tags::kDleq, claimed, rogue.sk, rng)}),
                                 "sk' witness for pk");

    std::size_t simulated = 0, garbage = 0, random_points = 0;
    for (std::size_t i = 0; i < options.key_switch_trials; ++i) {
        const std::string what = "trial " + std::to_string(i);
        switch (i % 3) {
            case 0: {
                const auto proof = dleq_simulate<G>(claimed, Scalar::random(rng), rng);
                tally.attempt_punch_rejected(rejected({punched, proof}), what + " simulated");
                ++simulated;
                break;
            }
            case 1: {
                Bytes wire_bytes;
                append_to(wire_bytes, G::encode(punched));
                const auto noise = rng.bytes<DleqProof<G>::kBytes>();
                append_to(wire_bytes, noise);
                bool rej = false;
                try {
                    client_punch_bytes<G>(pk, secret, card, wire_bytes, rng);
                } catch (const ProofRejected&) {
                    rej = true;
                }
                tally.attempt_punch_rejected(rej, what + " garbage bytes");
                ++garbage;
                break;
            }
            default: {
                DleqProof<G> proof;
                proof.a1 = G::hash_to_group("attack/a1", rng.bytes<32>());
                proof.a2 = G::hash_to_group("attack/a2", rng.bytes<32>());
                proof.z = Scalar::random(rng);
                tally.attempt_punch_rejected(rejected({punched, proof}), what + " random commitments");
                ++random_points;
                break;
            }
        }
    }

    // Honest punches by the real key are never refused.
    std::size_t honest = 0;
    for (int i = 0; i < 200; ++i) {
        try {
            std::tie(secret, card) = client_punch<G>(pk, secret, card, server.punch(card.p), rng);
            ++honest;
        } catch (const ProofRejected&) {
            tally.honest(false, "honest punch " + std::to_string(i));
        }
    }

    // End to end: a wallet punched once by a tagging server keeps its untagged state.
    server::ServerConfig rogue_cfg = Server::config(options.max_n);
    server::Service rogue_service(rogue_cfg, RedeemDb::in_memory(), Server::secret(rogue), quiet());
    server::LoopbackTransport rogue_loop(rogue_service);
    auto wallet = client::Wallet::in_memory({false, 64, nullptr, quiet()});
    wallet.fetch_public_key(Scheme::Main, server.counted);
    const auto id = wallet.new_card(Scheme::Main);
    const std::uint16_t n = std::min<std::uint16_t>(5, options.max_n);
    bool tag_survived = false;
    for (std::uint16_t k = 0; k < n; ++k) {
        wallet.punch(id, server.counted);
        const auto before = wallet.card(id).state;
        bool rej = false;
        try {
            wallet.punch(id, rogue_loop);
        } catch (const ProofRejected&) {
            rej = true;
        }
        tally.attempt_punch_rejected(rej, "wallet punch by tagging server");
        tag_survived |= wallet.card(id).state != before;
    }
    tally.honest(!tag_survived, "wallet state changed by a rejected punch");
    tally.honest(wallet.redeem(id, server.counted, n) == VerifyOutcome::Accepted, "untagged card redeemed");

    report.details["simulated"] = simulated;
    report.details["garbage"] = garbage;
    report.details["random_commitments"] = random_points;
    report.details["honest_punches_accepted"] = honest;
    return report;
}

AttackReport attack_eavesdropper_theft(Ledger& ledger, const AttackOptions& options) {
    AttackReport report;
    report.scenario = "eavesdropper_theft";
    Tally tally{report};
    auto rng = Rng::seeded(options.seed + 2);
    Server server(rng, options.max_n, ledger);
    TappedTransport tap(server.counted);
    const std::uint16_t n = std::min<std::uint16_t>(10, options.max_n);

    // Honest clients punch several cards while the adversary records everything.
    auto wallet = client::Wallet::in_memory({false, 64, nullptr, quiet()});
    wallet.fetch_public_key(Scheme::Main, tap);
    std::vector<client::CardId> cards;
    for (int c = 0; c < 4; ++c) {
        cards.push_back(wallet.new_card(Scheme::Main));
        for (std::uint16_t k = 0; k < n; ++k) wallet.punch(cards.back(), tap);
    }

    std::vector<Element> observed;
    for (const auto& [req, resp] : tap.transcript) {
        if (req.type == wire::MsgType::PunchReq) observed.push_back(G::decode(req.body));
        if (resp.type == wire::MsgType::PunchResp)
            observed.push_back(PunchResponse<G>::deserialize(resp.body).punched);
    }

    // Observed masked cards replayed as redemptions.
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const auto& e = observed[i];
        for (std::uint16_t guess_n : {static_cast<std::uint16_t>(1), n, options.max_n}) {
            tally.attempt(server.redeem(bytes_of(e), e, guess_n), "observed element as (u, p)");
            tally.attempt(server.redeem(rng.bytes<32>(), e, guess_n), "random u, observed p");
            if (i > 0) tally.attempt(server.redeem(bytes_of(observed[i - 1]), e, guess_n), "adjacent observations");
        }
    }

    // Redemption race: the adversary re-sends a just-observed redemption.
    std::size_t race_accepts = 0;
    for (auto id : cards) {
        const auto start = tap.transcript.size();
        tally.honest(wallet.redeem(id, tap, n) == VerifyOutcome::Accepted, "honest redemption");
        const auto& frame = tap.transcript.at(start).first;
        const auto replay = server.redeem_frame(frame);
        race_accepts += replay == VerifyOutcome::Accepted;
        tally.attempt(replay, "replayed redemption frame");
    }

    // Forgeries built from the transcript, including the u values revealed at redemption.
    std::vector<Secret32> revealed;
    for (auto id : cards) revealed.push_back(wallet.card(id).secret_u());
    for (std::size_t i = 0; i < options.forgeries; ++i) {
        Secret32 u;
        switch (i % 4) {
            case 0: u = rng.bytes<32>(); break;
            case 1: u = bytes_of(observed[rng.uniform(observed.size())]); break;
            case 2: u = sha256(G::encode(observed[rng.uniform(observed.size())])); break;
            default: u = revealed[rng.uniform(revealed.size())]; break;
        }
        Element p = observed[rng.uniform(observed.size())];
        switch (i % 3) {
            case 0: break;
            case 1: p = G::mul(p, observed[rng.uniform(observed.size())]); break;
            default: p = G::exp(p, Scalar::random(rng)); break;
        }
        const auto guess_n = static_cast<std::uint16_t>(1 + rng.uniform(options.max_n));
        tally.attempt(server.redeem(u, p, guess_n), "transcript forgery " + std::to_string(i));
    }

    report.details["observed_elements"] = observed.size();
    report.details["race_accepts"] = race_accepts;
    report.details["forgeries"] = options.forgeries;
    return report;
}

}  // namespace punchcard::testing
