#include "crash_sweep.hpp"

#include <sstream>

#include <spdlog/sinks/null_sink.h>

#include "faults.hpp"
#include "punchcard/client/wallet.hpp"
#include "punchcard/server/service.hpp"

namespace punchcard::testing {

namespace {

constexpr std::uint16_t kN = 3;

struct Variant {
    std::size_t compact_after;
    ScriptedFaults::Plan plan;
};

std::shared_ptr<spdlog::logger> quiet() {
    return std::make_shared<spdlog::logger>("crash-sweep", std::make_shared<spdlog::sinks::null_sink_mt>());
}

Secret32 fresh_secret() {
    auto rng = Rng::system();
    const auto sk = random_nonzero<MainGroup::Scalar>(rng).to_bytes();
    Secret32 out{};
    std::copy(sk.begin(), sk.end(), out.begin());
    return out;
}

server::ServerConfig main_config() {
    server::ServerConfig cfg;
    cfg.scheme = Scheme::Main;
    cfg.accepted_n = {kN};
    cfg.db_sync = false;
    return cfg;
}

/// Offsets worth cutting a write of `len` bytes at.
std::vector<std::size_t> cut_points(std::size_t len) {
    std::vector<std::size_t> out{0, 1, len / 2, len - 1, len};
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void add_plans(std::vector<Variant>& out, std::size_t compact_after, const ScriptedFaults& probe) {
    for (std::size_t w = 0; w < probe.writes.size(); ++w)
        for (auto cut : cut_points(probe.writes[w].len))
            out.push_back({compact_after, {w, cut, {}}});
    for (const auto& c : probe.checkpoints) out.push_back({compact_after, {std::nullopt, 0, c}});
}

std::string label(const Variant& v, const ScriptedFaults& probe) {
    std::string where = v.plan.write_index ? probe.writes.at(*v.plan.write_index).point : v.plan.checkpoint;
    return where + ": " + v.plan.describe() + (v.compact_after == 1 ? " (compacting)" : "");
}

}  // namespace

bool CrashSweep::ok() const {
    return std::all_of(cases.begin(), cases.end(), [](const CrashCase& c) { return c.ok; });
}

std::size_t CrashSweep::fired() const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const CrashCase& c) { return c.fired; }));
}

std::string CrashSweep::describe() const {
    std::ostringstream s;
    s << cases.size() << " crash plans, " << fired() << " fired";
    for (const auto& c : cases)
        if (!c.ok) s << "\n      " << c.plan << ": " << c.detail;
    return s.str();
}

CrashSweep sweep_wallet_punch(const std::filesystem::path& scratch, std::size_t plans) {
    const Secret32 sk = fresh_secret();
    server::Service service(main_config(), RedeemDb::in_memory(), sk, quiet());
    server::LoopbackTransport loop(service);

    auto prepare = [&](const std::filesystem::path& path, std::size_t compact_after, ScriptedFaults* faults,
                       std::uint32_t punches) {
        client::WalletOptions opts{false, compact_after, faults, quiet()};
        auto w = client::Wallet::open(path, opts);
        w.fetch_public_key(Scheme::Main, loop);
        const auto id = w.new_card(Scheme::Main);
        for (std::uint32_t k = 0; k < punches; ++k) w.punch(id, loop);
        return std::make_pair(std::move(w), id);
    };

    // Learn which writes one punch performs, with and without compaction.
    std::vector<Variant> all;
    ScriptedFaults probes[2];
    const std::size_t compact_modes[2] = {64, 1};
    for (int v = 0; v < 2; ++v) {
        auto [w, id] = prepare(scratch / ("probe-wallet-" + std::to_string(v)), compact_modes[v], &probes[v], 1);
        probes[v].record_only();
        w.punch(id, loop);
        add_plans(all, compact_modes[v], probes[v]);
    }

    CrashSweep out;
    for (std::size_t i = 0; i < plans; ++i) {
        const auto& variant = all[i % all.size()];
        const std::uint32_t j = static_cast<std::uint32_t>((i + i / all.size()) % kN);
        const auto path = scratch / ("wallet-" + std::to_string(i)) / "cards.pcw";
        CrashCase c;
        c.plan = label(variant, probes[variant.compact_after == 1 ? 1 : 0]) + ", " + std::to_string(j) + " punches before";

        ScriptedFaults faults;
        client::CardId id = 0;
        try {
            auto [w, card] = prepare(path, variant.compact_after, &faults, j);
            id = card;
            faults.arm(variant.plan);
            try {
                w.punch(id, loop);
            } catch (const SimulatedCrash&) {
            }
            c.fired = faults.fired;
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("unexpected error before recovery: ") + e.what();
            out.cases.push_back(c);
            continue;
        }

        try {
            auto w = client::Wallet::open(path, {false, 64, nullptr, quiet()});
            const auto punches = w.card(id).punches();
            if (w.size() != 1) {
                c.ok = false;
                c.detail = "wallet holds " + std::to_string(w.size()) + " cards";
            } else if (punches != j && punches != j + 1) {
                c.ok = false;
                c.detail = "card has " + std::to_string(punches) + " punches, expected " + std::to_string(j) + " or " +
                           std::to_string(j + 1);
            } else if (!c.fired && punches != j + 1) {
                c.ok = false;
                c.detail = "punch completed without a crash but was not kept";
            } else {
                for (auto k = punches; k < kN; ++k) w.punch(id, loop);
                const auto outcome = w.redeem(id, loop, kN);
                if (outcome != VerifyOutcome::Accepted) {
                    c.ok = false;
                    c.detail = "recovered card rejected: " + std::string(to_string(outcome));
                }
            }
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("recovery failed: ") + e.what();
        }
        out.cases.push_back(c);
    }
    return out;
}

CrashSweep sweep_server_redeem(const std::filesystem::path& scratch, std::size_t plans) {
    const Secret32 sk = fresh_secret();
    const auto cfg = main_config();
    // Punching needs only sk; a separate in-memory service prepares cards.
    server::Service puncher(cfg, RedeemDb::in_memory(), sk, quiet());
    server::LoopbackTransport punch_loop(puncher);
    auto wallet = client::Wallet::in_memory({false, 64, nullptr, quiet()});
    wallet.fetch_public_key(Scheme::Main, punch_loop);
    auto full_card = [&] {
        const auto id = wallet.new_card(Scheme::Main);
        for (std::uint16_t k = 0; k < kN; ++k) wallet.punch(id, punch_loop);
        return id;
    };
    constexpr int kAcked = 2;

    struct Opened {
        std::unique_ptr<server::Service> service;
        std::vector<client::CardId> acked;
    };
    auto prepare = [&](const std::filesystem::path& dir, std::size_t compact_after, ScriptedFaults* faults) {
        Opened o;
        o.service = std::make_unique<server::Service>(
            cfg, RedeemDb::open(dir, {false, compact_after, faults}), sk, quiet());
        server::LoopbackTransport loop(*o.service);
        for (int k = 0; k < kAcked; ++k) {
            const auto id = full_card();
            if (wallet.redeem(id, loop, kN) != VerifyOutcome::Accepted) throw Error("setup redemption rejected");
            o.acked.push_back(id);
        }
        return o;
    };

    std::vector<Variant> all;
    ScriptedFaults probes[2];
    const std::size_t compact_modes[2] = {1'000'000, 1};
    for (int v = 0; v < 2; ++v) {
        auto o = prepare(scratch / ("probe-db-" + std::to_string(v)), compact_modes[v], &probes[v]);
        probes[v].record_only();
        server::LoopbackTransport loop(*o.service);
        wallet.redeem(full_card(), loop, kN);
        add_plans(all, compact_modes[v], probes[v]);
    }

    CrashSweep out;
    for (std::size_t i = 0; i < plans; ++i) {
        const auto& variant = all[i % all.size()];
        const auto dir = scratch / ("db-" + std::to_string(i));
        CrashCase c;
        c.plan = label(variant, probes[variant.compact_after == 1 ? 1 : 0]);

        ScriptedFaults faults;
        std::vector<client::CardId> acked;
        const auto victim = full_card();
        try {
            auto o = prepare(dir, variant.compact_after, &faults);
            acked = o.acked;
            server::LoopbackTransport loop(*o.service);
            faults.arm(variant.plan);
            try {
                wallet.redeem(victim, loop, kN);
            } catch (const SimulatedCrash&) {
            }
            c.fired = faults.fired;
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("unexpected error before recovery: ") + e.what();
            out.cases.push_back(c);
            continue;
        }

        try {
            auto db = RedeemDb::open(dir, {false, 1'000'000, nullptr});
            for (auto id : acked)
                if (!db.contains(wallet.card(id).secret_u())) {
                    c.ok = false;
                    c.detail = "acknowledged redemption of card " + std::to_string(id) + " lost";
                }
            const bool durable = db.contains(wallet.card(victim).secret_u());
            server::Service service(cfg, std::move(db), sk, quiet());
            server::LoopbackTransport loop(service);

            std::size_t accepts = c.fired ? 0 : 1;  // without a crash the first attempt was answered
            for (int attempt = 0; attempt < 2; ++attempt)
                accepts += wallet.redeem(victim, loop, kN, true) == VerifyOutcome::Accepted;
            // Spent without a reply (crash after the log append) may never be accepted again.
            if (accepts > 1 || (!durable && accepts != 1)) {
                c.ok = false;
                c.detail = "interrupted card accepted " + std::to_string(accepts) + " times";
            }
            if (!c.fired && !durable) {
                c.ok = false;
                c.detail = "uninterrupted redemption not durable";
            }
            for (auto id : acked)
                if (wallet.redeem(id, loop, kN, true) != VerifyOutcome::DoubleSpend) {
                    c.ok = false;
                    c.detail = "acknowledged card " + std::to_string(id) + " redeemable again";
                }
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("recovery failed: ") + e.what();
        }
        out.cases.push_back(c);
    }
    return out;
}

}  // namespace punchcard::testing
