#include "checks.hpp"

#include <algorithm>
#include <sstream>

#include "punchcard/bench/harness.hpp"
#include "punchcard/client/wallet.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/extensions/expiry.hpp"
#include "punchcard/extensions/multi_punch.hpp"
#include "punchcard/extensions/redemption_proof.hpp"
#include "punchcard/group/toy.hpp"
#include "punchcard/server/daemon.hpp"
#include "punchcard/server/service.hpp"
#include "toy_oracle.hpp"

namespace punchcard::testing {

namespace {

using toy::ToyGroup;
using toy::ToyPairing;
namespace orc = oracle;

template <typename Scalar>
Secret32 secret_of(const Scalar& s) {
    Secret32 out{};
    const auto b = s.to_bytes();
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

server::ServerConfig config_for(Scheme scheme, std::vector<std::uint16_t> accepted) {
    server::ServerConfig cfg;
    cfg.scheme = scheme;
    cfg.accepted_n = std::move(accepted);
    return cfg;
}

std::string str(std::size_t v) { return std::to_string(v); }

}  // namespace

std::string CheckResult::describe() const {
    std::ostringstream out;
    out << checks << " checks";
    if (!summary.empty()) out << "; " << summary;
    for (const auto& f : failures) out << "\n      failed: " << f;
    return out.str();
}

WireSizes measure_main_wire_sizes() {
    auto rng = Rng::system();
    const auto keys = ServerKeys<MainGroup>::generate(rng);
    server::Service service(config_for(Scheme::Main, {10}), RedeemDb::in_memory(), secret_of(keys.sk));
    server::LoopbackTransport loop(service);
    bench::RecordingTransport t(loop);
    auto wallet = client::Wallet::in_memory();

    WireSizes s;
    wallet.fetch_public_key(Scheme::Main, t);
    s.pk = t.last_response.payload_size();
    const auto before = t.last_request;
    const auto id = wallet.new_card(Scheme::Main);
    s.issue = t.last_request == before ? 0 : t.last_request.payload_size();
    for (int i = 0; i < 10; ++i) wallet.punch(id, t);
    s.punch_request = t.last_request.payload_size();
    s.punch_response = t.last_response.payload_size();
    if (wallet.redeem(id, t, 10) != VerifyOutcome::Accepted) throw Error("wire size cycle rejected");
    s.redeem_request = t.last_request.payload_size();
    return s;
}

WireSizes measure_merge_wire_sizes() {
    auto rng = Rng::system();
    const auto keys = MergeServerKeys<MergeGroups>::generate(rng);
    server::Service service(config_for(Scheme::Mergeable, {10}), RedeemDb::in_memory(), secret_of(keys.sk));
    server::LoopbackTransport loop(service);
    bench::RecordingTransport t(loop);
    auto wallet = client::Wallet::in_memory();

    WireSizes s;
    wallet.fetch_public_key(Scheme::Mergeable, t);
    s.pk = t.last_response.payload_size();
    const auto before = t.last_request;
    const auto a = wallet.new_card(Scheme::Mergeable);
    const auto b = wallet.new_card(Scheme::Mergeable);
    s.issue = t.last_request == before ? 0 : t.last_request.payload_size();
    for (int i = 0; i < 4; ++i) wallet.punch(a, t);
    for (int i = 0; i < 6; ++i) wallet.punch(b, t);
    s.punch_request = t.last_request.payload_size();
    s.punch_response = t.last_response.payload_size();
    if (wallet.merge_redeem(a, b, t, 10) != VerifyOutcome::Accepted) throw Error("merge wire size cycle rejected");
    s.redeem_request = t.last_request.payload_size();
    return s;
}

namespace {

CheckResult check_sizes(const WireSizes& s, const WireSizes& want) {
    CheckResult r;
    r.expect(s.pk == want.pk, "pk " + str(s.pk) + " != " + str(want.pk));
    r.expect(s.issue == want.issue, "issue " + str(s.issue) + " != " + str(want.issue));
    r.expect(s.punch_request == want.punch_request,
             "punch request " + str(s.punch_request) + " != " + str(want.punch_request));
    r.expect(s.punch_response == want.punch_response,
             "punch response " + str(s.punch_response) + " != " + str(want.punch_response));
    r.expect(s.redeem_request == want.redeem_request,
             "redeem request " + str(s.redeem_request) + " != " + str(want.redeem_request));
    r.summary = "pk " + str(s.pk) + ", issue " + str(s.issue) + ", punch req " + str(s.punch_request) +
                ", punch resp " + str(s.punch_response) + ", redeem " + str(s.redeem_request);
    return r;
}

}  // namespace

CheckResult check_main_wire_sizes() { return check_sizes(measure_main_wire_sizes(), {32, 0, 32, 128, 64}); }
CheckResult check_merge_wire_sizes() { return check_sizes(measure_merge_wire_sizes(), {144, 0, 144, 496, 640}); }

CheckResult check_correctness(std::size_t cycles, std::uint16_t n, std::size_t merge_cycles) {
    CheckResult r;
    auto rng = Rng::system();
    std::size_t accepted = 0, duplicates_rejected = 0;
    {
        const auto keys = ServerKeys<MainGroup>::generate(rng);
        server::Service service(config_for(Scheme::Main, {n}), RedeemDb::in_memory(), secret_of(keys.sk));
        server::LoopbackTransport loop(service);
        auto wallet = client::Wallet::in_memory();
        wallet.fetch_public_key(Scheme::Main, loop);
        for (std::size_t c = 0; c < cycles; ++c) {
            const auto id = wallet.new_card(Scheme::Main);
            for (std::uint16_t i = 0; i < n; ++i) wallet.punch(id, loop);
            const auto first = wallet.redeem(id, loop, n);
            r.expect(first == VerifyOutcome::Accepted, "cycle " + str(c) + ": " + std::string(to_string(first)));
            accepted += first == VerifyOutcome::Accepted;
            const auto again = wallet.redeem(id, loop, n, true);
            r.expect(again == VerifyOutcome::DoubleSpend, "cycle " + str(c) + " duplicate: " + std::string(to_string(again)));
            duplicates_rejected += again == VerifyOutcome::DoubleSpend;
        }
        r.expect(service.db().size() == cycles, "db holds " + str(service.db().size()) + " secrets");
    }
    std::size_t merged = 0, merge_dups = 0;
    if (merge_cycles > 0) {
        const auto keys = MergeServerKeys<MergeGroups>::generate(rng);
        server::Service service(config_for(Scheme::Mergeable, {n}), RedeemDb::in_memory(), secret_of(keys.sk));
        server::LoopbackTransport loop(service);
        auto wallet = client::Wallet::in_memory();
        wallet.fetch_public_key(Scheme::Mergeable, loop);
        for (std::size_t c = 0; c < merge_cycles; ++c) {
            const std::uint16_t i = static_cast<std::uint16_t>(c % (n + 1));
            const auto a = wallet.new_card(Scheme::Mergeable);
            const auto b = wallet.new_card(Scheme::Mergeable);
            for (std::uint16_t k = 0; k < i; ++k) wallet.punch(a, loop);
            for (std::uint16_t k = i; k < n; ++k) wallet.punch(b, loop);
            const auto first = wallet.merge_redeem(a, b, loop, n);
            r.expect(first == VerifyOutcome::Accepted, "merge " + str(c) + ": " + std::string(to_string(first)));
            merged += first == VerifyOutcome::Accepted;
            const auto again = wallet.merge_redeem(a, b, loop, n, true);
            r.expect(again == VerifyOutcome::DoubleSpend, "merge " + str(c) + " duplicate accepted");
            merge_dups += again == VerifyOutcome::DoubleSpend;
        }
        r.expect(service.db().size() == 2 * merge_cycles, "merge db holds " + str(service.db().size()) + " secrets");
    }
    r.summary = str(accepted) + "/" + str(cycles) + " main cycles accepted, " + str(duplicates_rejected) +
                " duplicates rejected; " + str(merged) + "/" + str(merge_cycles) + " merges accepted, " +
                str(merge_dups) + " duplicates rejected";
    return r;
}

CheckResult check_toy_main_oracle(std::uint32_t max_punches, std::size_t reps, std::uint64_t seed) {
    using G = ToyGroup;
    CheckResult r;
    auto rng = Rng::seeded(seed);
    for (std::uint32_t target = 0; target <= max_punches; ++target) {
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const auto keys = ServerKeys<G>::generate(rng);
            const std::uint64_t sk = keys.sk.value();
            r.expect(keys.pk.residue() == orc::element(orc::kGMain, sk), "pk");
            auto db = RedeemDb::in_memory();

            auto [secret, card] = issue<G>(rng);
            const std::uint64_t h = orc::hash_exponent(tags::kHashMain, secret.u);
            const std::string where = "k=" + str(target) + " rep=" + str(rep);
            r.expect(card.p.residue() == orc::element(orc::kGMain, orc::mulq(h, secret.m.value())), where + " issue");

            std::uint64_t sk_pow = 1;  // sk^k mod q
            for (std::uint32_t k = 0; k < target; ++k) {
                const auto resp = server_punch<G>(keys, card.p, rng);
                const std::uint64_t sent_exp = orc::mulq(orc::mulq(h, secret.m.value()), sk_pow);
                r.expect(resp.punched.residue() == orc::element(orc::kGMain, orc::mulq(sent_exp, sk)),
                         where + " server punch " + str(k));
                std::tie(secret, card) = client_punch<G>(keys.pk, secret, card, resp, rng);
                sk_pow = orc::mulq(sk_pow, sk);
                r.expect(card.p.residue() == orc::element(orc::kGMain, orc::mulq(orc::mulq(h, secret.m.value()), sk_pow)),
                         where + " client punch " + str(k));
            }
            const auto req = client_redeem<G>(secret, card);
            r.expect(req.p.residue() == orc::element(orc::kGMain, orc::mulq(h, sk_pow)), where + " redeem");
            // A wrong count must fail unless sk^k happens to collide mod q.
            const std::uint64_t sk_next = orc::mulq(sk_pow, sk);
            if (orc::element(orc::kGMain, orc::mulq(h, sk_next)) != req.p.residue())
                r.expect(server_verify<G>(keys, db, req, target + 1) == VerifyOutcome::BadCard, where + " n+1");
            r.expect(server_verify<G>(keys, db, req, target) == VerifyOutcome::Accepted, where + " verify");
            r.expect(server_verify<G>(keys, db, req, target) == VerifyOutcome::DoubleSpend, where + " duplicate");
        }
    }
    r.summary = "punch counts 0.." + str(max_punches) + ", " + str(reps) + " cards each";
    return r;
}

CheckResult check_toy_merge_oracle(std::uint16_t n, std::uint32_t max_punches, std::uint64_t seed) {
    using P = ToyPairing;
    CheckResult r;
    auto rng = Rng::seeded(seed);

    struct Tracked {
        MergeCardSecret<P> secret;
        MergeCard<P> card;
        std::uint64_t h0, h1;
        std::uint64_t sk_pow = 1;
    };
    auto check_state = [&](const Tracked& t, const std::string& where) {
        r.expect(t.card.p0.residue() == orc::element(orc::kG0, orc::mulq(orc::mulq(t.h0, t.secret.m0.value()), t.sk_pow)),
                 where + " p0");
        r.expect(t.card.p1.residue() == orc::element(orc::kG1, orc::mulq(orc::mulq(t.h1, t.secret.m1.value()), t.sk_pow)),
                 where + " p1");
    };

    const auto keys = MergeServerKeys<P>::generate(rng);
    const std::uint64_t sk = keys.sk.value();
    const auto pk = MergePublicKey<P>::of(keys);
    r.expect(keys.pk0.residue() == orc::element(orc::kG0, sk) && keys.pk1.residue() == orc::element(orc::kG1, sk),
             "merge pk");

    auto fresh = [&] {
        Tracked t;
        std::tie(t.secret, t.card) = merge_issue<P>(rng);
        t.h0 = orc::hash_exponent(tags::kHashMergeG0, t.secret.u);
        t.h1 = orc::hash_exponent(tags::kHashMergeG1, t.secret.u);
        return t;
    };
    auto punch = [&](Tracked& t, const std::string& where) {
        const auto resp = merge_server_punch<P>(keys, t.card, rng);
        r.expect(resp.punched0.residue() == orc::powm(t.card.p0.residue(), sk, orc::kP), where + " server p0'");
        r.expect(resp.punched1.residue() == orc::powm(t.card.p1.residue(), sk, orc::kP), where + " server p1'");
        std::tie(t.secret, t.card) = merge_client_punch<P>(pk, t.secret, t.card, resp, rng);
        t.sk_pow = orc::mulq(t.sk_pow, sk);
        check_state(t, where);
    };

    for (std::uint32_t k = 0; k <= max_punches; ++k) {
        auto t = fresh();
        check_state(t, "single k=" + str(k) + " issue");
        for (std::uint32_t i = 0; i < k; ++i) punch(t, "single k=" + str(k) + " punch " + str(i));
    }

    auto db = RedeemDb::in_memory();
    for (std::uint16_t i = 0; i <= n; ++i) {
        const std::uint16_t j = n - i;
        const std::string where = "split " + str(i) + "+" + str(j);
        auto a = fresh();
        auto b = fresh();
        for (std::uint16_t k = 0; k < i; ++k) punch(a, where + " A" + str(k));
        for (std::uint16_t k = 0; k < j; ++k) punch(b, where + " B" + str(k));
        const auto req = client_merge_redeem<P>(a.secret, a.card, b.secret, b.card);
        const std::uint64_t want = orc::mulq(orc::mulq(a.h0, orc::powm(sk, n, orc::kQ)), b.h1);
        r.expect(req.merged.residue() == orc::element(orc::kGT, want), where + " merged value");
        r.expect(merge_server_verify<P>(keys, db, req, n) == VerifyOutcome::Accepted, where + " verify");
        r.expect(db.contains(a.secret.u) && db.contains(b.secret.u), where + " both secrets stored");
        r.expect(merge_server_verify<P>(keys, db, req, n) == VerifyOutcome::DoubleSpend, where + " duplicate");
    }
    r.summary = "single-card counts 0.." + str(max_punches) + ", all " + str(n + 1) + " splits of n=" + str(n);
    return r;
}

CheckResult check_proof_robustness(bool exhaustive, std::size_t wrong_key_trials) {
    using G = MainGroup;
    CheckResult r;
    auto rng = Rng::system();
    const auto keys = ServerKeys<G>::generate(rng);
    const auto issued = issue<G>(rng);
    const auto& secret = issued.first;
    const auto& card = issued.second;
    const Bytes good = server_punch<G>(keys, card.p, rng).serialize();
    r.expect(good.size() == 128, "punch response is " + str(good.size()) + " bytes");

    auto accepts = [&](ByteView bytes) {
        try {
            client_punch_bytes<G>(keys.pk, secret, card, bytes, rng);
            return true;
        } catch (const ProofRejected&) {
            return false;
        }
    };
    r.expect(accepts(good), "untouched response rejected");

    std::size_t corruptions = 0, rejected = 0;
    const std::vector<std::uint8_t> sample{0x01, 0x80, 0xff};
    for (std::size_t pos = 0; pos < good.size(); ++pos) {
        for (unsigned d = 1; d < 256; ++d) {
            const auto delta = static_cast<std::uint8_t>(d);
            if (!exhaustive && std::find(sample.begin(), sample.end(), delta) == sample.end()) continue;
            Bytes bad = good;
            bad[pos] ^= delta;
            ++corruptions;
            const bool ok = accepts(bad);
            rejected += !ok;
            r.expect(!ok, "corruption at byte " + str(pos) + " xor " + str(d) + " accepted");
        }
    }

    std::size_t wrong_rejected = 0;
    for (std::size_t i = 0; i < wrong_key_trials; ++i) {
        const auto rogue = ServerKeys<G>::generate(rng);
        const auto resp = server_punch<G>(rogue, card.p, rng);
        const bool ok = accepts(resp.serialize());
        wrong_rejected += !ok;
        r.expect(!ok, "wrong-key punch " + str(i) + " accepted");
    }
    r.summary = str(rejected) + "/" + str(corruptions) + " single-byte corruptions rejected, " +
                str(wrong_rejected) + "/" + str(wrong_key_trials) + " wrong-key punches rejected";
    return r;
}

CheckResult check_verify_scaling(const std::vector<std::size_t>& sizes, std::size_t trials, double max_ratio) {
    CheckResult r;
    const auto rows = bench::bench_verify_scaling(sizes, trials);
    double lo = rows.front().us.mean, hi = rows.front().us.mean;
    const double empty = rows.front().us.mean;
    std::ostringstream s;
    for (const auto& row : rows) {
        lo = std::min(lo, row.us.mean);
        hi = std::max(hi, row.us.mean);
        r.expect(row.us.count >= bench::kMinTrials, "fewer than 100 trials");
        s << row.db_size << ": " << row.us.mean << " us; ";
    }
    r.expect(hi / lo < max_ratio, "max/min ratio " + std::to_string(hi / lo));
    s << "max/min " << hi / lo << ", largest/empty " << rows.back().us.mean / empty;
    r.summary = s.str();
    return r;
}

CheckResult check_performance(std::size_t trials, double max_punch_ms, double max_verify_ms) {
    CheckResult r;
    bench::BenchOptions opt;
    opt.trials = trials;
    const auto table = bench::bench_main(opt);
    const double punch = table.row("ServerPunch").ms.mean + table.row("ClientPunch").ms.mean;
    const double verify = table.row("ServerVerify").ms.mean;
    r.expect(punch < max_punch_ms, "punch round trip " + std::to_string(punch) + " ms");
    r.expect(verify < max_verify_ms, "verify " + std::to_string(verify) + " ms");
    r.summary = "punch round trip " + std::to_string(punch) + " ms, verify " + std::to_string(verify) + " ms";
    return r;
}

CheckResult check_multi_punch_additivity(std::uint32_t max_sum, std::uint64_t seed) {
    using G = ToyGroup;
    CheckResult r;
    auto rng = Rng::seeded(seed);
    std::size_t compositions = 0;
    for (std::uint32_t total = 1; total <= max_sum; ++total) {
        // Bit i of mask set: a part ends after unit i.
        for (std::uint32_t mask = 0; mask < (1U << (total - 1)); ++mask) {
            std::vector<std::uint32_t> parts;
            std::uint32_t run = 1;
            for (std::uint32_t i = 0; i + 1 < total; ++i) {
                if (mask & (1U << i)) {
                    parts.push_back(run);
                    run = 1;
                } else {
                    ++run;
                }
            }
            parts.push_back(run);
            ++compositions;

            const auto keys = ServerKeys<G>::generate(rng);
            const std::uint64_t sk = keys.sk.value();
            auto [secret, card] = issue<G>(rng);
            const std::uint64_t h = orc::hash_exponent(tags::kHashMain, secret.u);
            std::string name = "composition";
            for (auto p : parts) name += " " + str(p);

            std::uint64_t sk_pow = 1;
            for (auto t : parts) {
                const auto resp = server_multi_punch<G>(keys, card.p, t, rng, max_sum);
                std::uint64_t e = orc::mulq(orc::mulq(h, secret.m.value()), sk_pow);
                for (std::uint32_t i = 0; i < t; ++i) {
                    e = orc::mulq(e, sk);
                    r.expect(resp.links[i].punched.residue() == orc::element(orc::kGMain, e), name + " link " + str(i));
                }
                std::tie(secret, card) = client_multi_punch<G>(keys.pk, secret, card, resp, t, rng);
                sk_pow = orc::mulq(sk_pow, orc::powm(sk, t, orc::kQ));
                r.expect(card.p.residue() == orc::element(orc::kGMain, orc::mulq(orc::mulq(h, secret.m.value()), sk_pow)),
                         name + " state");
            }
            auto db = RedeemDb::in_memory();
            const auto req = client_redeem<G>(secret, card);
            r.expect(req.p.residue() == orc::element(orc::kGMain, orc::mulq(h, orc::powm(sk, total, orc::kQ))),
                     name + " unmasked");
            r.expect(server_verify<G>(keys, db, req, total) == VerifyOutcome::Accepted, name + " verify");
        }
    }
    r.summary = str(compositions) + " compositions with sum <= " + str(max_sum);
    return r;
}

CheckResult check_expiry_purge_replay(const std::filesystem::path& scratch) {
    CheckResult r;
    auto rng = Rng::system();
    server::ServerConfig cfg = config_for(Scheme::Main, {3});
    cfg.expiry_enabled = true;
    cfg.expiry = ExpiryPolicy{ExpiryGranularity::Quarter, 8};
    cfg.db_path = scratch / "db";
    cfg.db_sync = false;
    const auto keys = ServerKeys<MainGroup>::generate(rng);

    const Date issued = parse_date("2026-08-20");
    const Date soon = parse_date("2026-10-01");
    const Date later = parse_date("2027-01-01");
    const Date after = parse_date("2026-10-02");

    auto wallet = client::Wallet::in_memory();
    client::NewCardOptions soon_opts{soon, false, issued, cfg.expiry};
    client::NewCardOptions later_opts{later, false, issued, cfg.expiry};
    client::CardId expiring = 0, lasting = 0;
    {
        server::Service service(cfg, RedeemDb::open(cfg.db_path), secret_of(keys.sk));
        service.set_clock([&] { return issued; });
        server::LoopbackTransport loop(service);
        wallet.fetch_public_key(Scheme::Main, loop);
        expiring = wallet.new_card(Scheme::Main, soon_opts);
        lasting = wallet.new_card(Scheme::Main, later_opts);
        const auto u = wallet.card(expiring).secret_u();
        r.expect(secret_expiry(u) == soon, "u prefix encodes the expiry boundary");
        for (int i = 0; i < 3; ++i) {
            wallet.punch(expiring, loop);
            wallet.punch(lasting, loop);
        }
        r.expect(wallet.redeem(expiring, loop, 3) == VerifyOutcome::Accepted, "expiring card redeemed while valid");
        r.expect(wallet.redeem(lasting, loop, 3) == VerifyOutcome::Accepted, "lasting card redeemed");

        // A card past its date is rejected as expired even if never spent.
        const auto stale = wallet.new_card(Scheme::Main, soon_opts);
        for (int i = 0; i < 3; ++i) wallet.punch(stale, loop);
        service.set_clock([&] { return after; });
        r.expect(wallet.redeem(stale, loop, 3) == VerifyOutcome::Expired, "unspent expired card rejected");
    }

    // Offline purge refuses without expiry, then removes only the past entry.
    auto no_expiry = cfg;
    no_expiry.expiry_enabled = false;
    bool refused = false;
    try {
        server::purge(no_expiry, after);
    } catch (const ConfigError&) {
        refused = true;
    }
    r.expect(refused, "purge with expiry disabled was not refused");
    const auto removed = server::purge(cfg, after);
    r.expect(removed == 1, "purge removed " + str(removed) + " entries, expected 1");

    {
        server::Service service(cfg, RedeemDb::open(cfg.db_path), secret_of(keys.sk));
        service.set_clock([&] { return after; });
        server::LoopbackTransport loop(service);
        r.expect(!service.db().contains(wallet.card(expiring).secret_u()), "purged secret still stored");
        r.expect(service.db().contains(wallet.card(lasting).secret_u()), "unexpired secret was purged");
        const auto replay = wallet.redeem(expiring, loop, 3, true);
        r.expect(replay == VerifyOutcome::Expired, "replay after purge: " + std::string(to_string(replay)));
        const auto replay2 = wallet.redeem(lasting, loop, 3, true);
        r.expect(replay2 == VerifyOutcome::DoubleSpend, "replay of unexpired card: " + std::string(to_string(replay2)));

        // Beyond the horizon: rejected as bad-card.
        auto far = RedeemRequest<MainGroup>{};
        far.u = rng.bytes<32>();
        const auto days = static_cast<std::uint32_t>(parse_date("2030-01-01").time_since_epoch().count());
        for (int i = 0; i < 4; ++i) far.u[i] = static_cast<std::uint8_t>(days >> (24 - 8 * i));
        far.p = MainGroup::exp(card_base<MainGroup>(far.u), pow_int(keys.sk, 3));
        const auto reply = service.handle(wire::make_redeem_request(wire::MsgType::RedeemReq, far.serialize(), 3));
        r.expect(reply.body.size() == 1 && reply.body[0] == static_cast<std::uint8_t>(VerifyOutcome::BadCard),
                 "far-future expiry not rejected as bad-card");
    }
    r.summary = "purged " + str(removed) + " expired secret; replay rejected as expired";
    return r;
}

CheckResult check_redemption_proof(std::size_t forgeries) {
    using G = MainGroup;
    CheckResult r;
    auto rng = Rng::system();
    PunchServer<G> server(ServerKeys<G>::generate(rng));
    auto db = RedeemDb::in_memory();
    RedemptionRegistry registry;
    ProvableRedemptionServer<G> provable(server, db, registry);

    auto card = issue_with_redemption_proof<G>(rng);
    r.expect(card.secret.u == derive_card_secret(card.rs), "u is not derived from rs");
    for (int i = 0; i < 5; ++i)
        std::tie(card.secret, card.card) =
            client_punch<G>(server.keys().pk, card.secret, card.card, server.punch(card.card.p, rng), rng);
    const auto req = client_redeem<G>(card.secret, card.card);

    const auto begin = provable.begin(req, 5);
    r.expect(begin.outcome == VerifyOutcome::Accepted, "valid card not asked for rs");
    r.expect(!db.contains(req.u), "u stored before rs was revealed");
    r.expect(provable.finish(req.u, rng.bytes<32>()) == VerifyOutcome::BadCard, "wrong rs accepted");
    r.expect(provable.finish(req.u, card.rs) == VerifyOutcome::Accepted, "true rs rejected");
    r.expect(registry.lookup(req.u) == card.rs, "(u, rs) not stored");

    const auto again = provable.begin(req, 5);
    r.expect(again.outcome == VerifyOutcome::DoubleSpend, "duplicate not detected");
    r.expect(again.prior_rs.has_value() && confirm_prior_redemption(req.u, *again.prior_rs),
             "client could not confirm the stored rs");
    r.expect(confirm_prior_redemption(req.u, provable.prove_prior_redemption(req.u)), "prove_prior_redemption");

    bool threw = false;
    try {
        provable.prove_prior_redemption(rng.bytes<32>());
    } catch (const NoSuchRedemption&) {
        threw = true;
    }
    r.expect(threw, "NoSuchRedemption not raised for an unredeemed card");

    // A server claiming a prior redemption must produce a preimage of u.
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < forgeries; ++i) {
        const bool ok = confirm_prior_redemption(req.u, rng.bytes<32>());
        rejected += !ok;
        if (ok) r.expect(false, "forged rs " + str(i) + " accepted");
    }
    r.checks += forgeries;
    r.summary = "true rs confirmed; " + str(rejected) + "/" + str(forgeries) + " random rs rejected";
    return r;
}

}  // namespace punchcard::testing
