#include "punchcard/bench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <spdlog/fmt/fmt.h>

#include "punchcard/client/wallet.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/mergeable.hpp"
#include "punchcard/punchcard.hpp"
#include "punchcard/server/service.hpp"

namespace punchcard::bench {

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& f) {
    const auto start = Clock::now();
    f();
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Rng make_rng(std::uint64_t seed) { return seed == 0 ? Rng::system() : Rng::seeded(seed); }

void require_trials(std::size_t trials) {
    if (trials < kMinTrials)
        throw std::invalid_argument("at least " + std::to_string(kMinTrials) + " trials per operation are required");
}

template <typename Scalar>
Secret32 secret_bytes(const Scalar& s) {
    Secret32 out{};
    const auto b = s.to_bytes();
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

std::vector<Secret32> random_secrets(std::size_t count, Rng& rng) {
    std::vector<Secret32> out(count);
    constexpr std::size_t kChunk = 4096;
    Bytes buf(kChunk * 32);
    for (std::size_t i = 0; i < count; i += kChunk) {
        const std::size_t take = std::min(kChunk, count - i);
        rng.fill(std::span(buf.data(), take * 32));
        for (std::size_t j = 0; j < take; ++j) std::copy_n(buf.data() + 32 * j, 32, out[i + j].begin());
    }
    return out;
}

RedeemDb prefilled_db(std::size_t size, Rng& rng) {
    auto db = RedeemDb::in_memory();
    if (size > 0) db.bulk_insert(random_secrets(size, rng));
    return db;
}

server::ServerConfig bench_config(Scheme scheme, std::uint16_t n) {
    server::ServerConfig cfg;
    cfg.scheme = scheme;
    cfg.accepted_n = {n};
    return cfg;
}

/// Byte counts of one real cycle through the wire encoding.
struct MeasuredBytes {
    std::size_t setup = 0, issue = 0, server_punch = 0, client_punch = 0, client_redeem = 0;
};

class CountingTransport : public RecordingTransport {
public:
    using RecordingTransport::RecordingTransport;
    wire::Frame roundtrip(const wire::Frame& request) override {
        ++requests;
        return RecordingTransport::roundtrip(request);
    }
    std::size_t requests = 0;
};

MeasuredBytes measure_main_bytes(const Secret32& sk, std::uint16_t n) {
    server::Service service(bench_config(Scheme::Main, n), RedeemDb::in_memory(), sk);
    server::LoopbackTransport loop(service);
    CountingTransport t(loop);
    auto wallet = client::Wallet::in_memory();
    MeasuredBytes b;

    wallet.fetch_public_key(Scheme::Main, t);
    b.setup = t.last_response.payload_size();

    const auto before = t.requests;
    const auto id = wallet.new_card(Scheme::Main);
    b.issue = t.requests == before ? 0 : t.last_request.payload_size();

    for (std::uint16_t i = 0; i < n; ++i) wallet.punch(id, t);
    b.client_punch = t.last_request.payload_size();
    b.server_punch = t.last_response.payload_size();

    if (wallet.redeem(id, t, n) != VerifyOutcome::Accepted) throw Error("bench cycle: redemption rejected");
    b.client_redeem = t.last_request.payload_size();
    return b;
}

MeasuredBytes measure_merge_bytes(const Secret32& sk, std::uint16_t n) {
    server::Service service(bench_config(Scheme::Mergeable, n), RedeemDb::in_memory(), sk);
    server::LoopbackTransport loop(service);
    CountingTransport t(loop);
    auto wallet = client::Wallet::in_memory();
    MeasuredBytes b;

    wallet.fetch_public_key(Scheme::Mergeable, t);
    b.setup = t.last_response.payload_size();

    const auto before = t.requests;
    const auto a = wallet.new_card(Scheme::Mergeable);
    const auto c = wallet.new_card(Scheme::Mergeable);
    b.issue = t.requests == before ? 0 : t.last_request.payload_size();

    const std::uint16_t i_punches = n / 2;
    for (std::uint16_t i = 0; i < i_punches; ++i) wallet.punch(a, t);
    for (std::uint16_t i = i_punches; i < n; ++i) wallet.punch(c, t);
    b.client_punch = t.last_request.payload_size();
    b.server_punch = t.last_response.payload_size();

    if (wallet.merge_redeem(a, c, t, n) != VerifyOutcome::Accepted) throw Error("bench cycle: merge rejected");
    b.client_redeem = t.last_request.payload_size();
    return b;
}

}  // namespace

Stats summarize(const std::vector<double>& samples) {
    Stats s;
    s.count = samples.size();
    if (samples.empty()) return s;
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double sq = 0;
        for (double x : samples) sq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(samples.size() - 1));
    }
    return s;
}

const BenchRow& BenchTable::row(std::string_view operation) const {
    for (const auto& r : rows)
        if (r.operation == operation) return r;
    throw std::out_of_range("no bench row " + std::string(operation));
}

std::string BenchTable::to_text() const {
    std::string out = fmt::format("{} scheme over {}: {} trials per operation, {} spent secrets in db\n", scheme,
                                  group, trials, db_size);
    out += fmt::format("{:<14} {:>12} {:>12} {:>18}\n", "Operation", "Mean (ms)", "Stddev (ms)", "Data sent (bytes)");
    for (const auto& r : rows)
        out += fmt::format("{:<14} {:>12.4f} {:>12.4f} {:>18}\n", r.operation, r.ms.mean, r.ms.stddev, r.bytes);
    out += "ServerVerify's 1-byte status reply is not counted.\n";
    return out;
}

std::string BenchTable::to_csv(bool header) const {
    std::string out = header ? "scheme,operation,trials,db_size,mean_ms,stddev_ms,bytes\n" : "";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{},{:.6f},{:.6f},{}\n", scheme, r.operation, trials, db_size, r.ms.mean,
                           r.ms.stddev, r.bytes);
    return out;
}

BenchTable bench_main(const BenchOptions& opt) {
    using G = MainGroup;
    require_trials(opt.trials);
    auto rng = make_rng(opt.seed);
    const std::size_t T = opt.trials;
    BenchTable table{"main", "ristretto255", T, opt.db_size, {}};

    std::vector<double> setup, issue_t, spunch, cpunch, credeem, verify;
    ServerKeys<G> keys;
    for (std::size_t i = 0; i < T; ++i) setup.push_back(time_ms([&] { keys = ServerKeys<G>::generate(rng); }));

    std::vector<std::pair<CardSecret<G>, PunchCard<G>>> cards(T);
    for (std::size_t i = 0; i < T; ++i) issue_t.push_back(time_ms([&] { cards[i] = issue<G>(rng); }));

    std::vector<PunchResponse<G>> responses(T);
    for (std::size_t i = 0; i < T; ++i)
        spunch.push_back(time_ms([&] { responses[i] = server_punch<G>(keys, cards[i].second.p, rng); }));

    for (std::size_t i = 0; i < T; ++i)
        cpunch.push_back(time_ms([&] {
            cards[i] = client_punch<G>(keys.pk, cards[i].first, cards[i].second, responses[i], rng);
        }));

    std::vector<RedeemRequest<G>> redeems(T);
    for (std::size_t i = 0; i < T; ++i)
        credeem.push_back(time_ms([&] { redeems[i] = client_redeem<G>(cards[i].first, cards[i].second); }));

    // Verify fixtures: valid n-punch requests built directly from sk.
    PunchServer<G> server(keys);
    auto db = prefilled_db(opt.db_size, rng);
    const auto sk_n = server.cache().get(opt.n);
    std::vector<RedeemRequest<G>> valid(T);
    for (auto& req : valid) {
        req.u = rng.bytes<32>();
        req.p = G::exp(card_base<G>(req.u), sk_n);
    }
    for (std::size_t i = 0; i < T; ++i) {
        VerifyOutcome out{};
        verify.push_back(time_ms([&] { out = server.verify(db, valid[i], opt.n); }));
        if (out != VerifyOutcome::Accepted) throw Error("bench: valid redemption rejected");
    }

    const auto bytes = measure_main_bytes(secret_bytes(keys.sk), opt.n);
    table.rows = {
        {"ServerSetup", summarize(setup), bytes.setup},
        {"Issue", summarize(issue_t), bytes.issue},
        {"ServerPunch", summarize(spunch), bytes.server_punch},
        {"ClientPunch", summarize(cpunch), bytes.client_punch},
        {"ClientRedeem", summarize(credeem), bytes.client_redeem},
        {"ServerVerify", summarize(verify), 0},
    };
    return table;
}

BenchTable bench_mergeable(const BenchOptions& opt) {
    using P = MergeGroups;
    require_trials(opt.trials);
    auto rng = make_rng(opt.seed);
    const std::size_t T = opt.trials;
    BenchTable table{"mergeable", "BLS12-381", T, opt.db_size, {}};

    std::vector<double> setup, issue_t, spunch, cpunch, credeem, verify;
    MergeServerKeys<P> keys;
    for (std::size_t i = 0; i < T; ++i) setup.push_back(time_ms([&] { keys = MergeServerKeys<P>::generate(rng); }));
    const auto pk = MergePublicKey<P>::of(keys);

    std::vector<std::pair<MergeCardSecret<P>, MergeCard<P>>> cards(T);
    for (std::size_t i = 0; i < T; ++i) issue_t.push_back(time_ms([&] { cards[i] = merge_issue<P>(rng); }));

    std::vector<MergePunchResponse<P>> responses(T);
    for (std::size_t i = 0; i < T; ++i)
        spunch.push_back(time_ms([&] { responses[i] = merge_server_punch<P>(keys, cards[i].second, rng); }));

    for (std::size_t i = 0; i < T; ++i)
        cpunch.push_back(time_ms([&] {
            cards[i] = merge_client_punch<P>(pk, cards[i].first, cards[i].second, responses[i], rng);
        }));

    std::vector<MergeRedeemRequest<P>> redeems(T);
    for (std::size_t i = 0; i < T; ++i) {
        const auto& a = cards[i];
        const auto& b = cards[(i + 1) % T];
        credeem.push_back(time_ms([&] { redeems[i] = client_merge_redeem<P>(a.first, a.second, b.first, b.second); }));
    }

    MergePunchServer<P> server(keys);
    auto db = prefilled_db(opt.db_size, rng);
    const auto sk_n = pow_int(keys.sk, opt.n);
    std::vector<MergeRedeemRequest<P>> valid(T);
    for (auto& req : valid) {
        req.u = rng.bytes<32>();
        req.u_other = rng.bytes<32>();
        req.merged = P::pair(P::G0::exp(merge_base0<P>(req.u), sk_n), merge_base1<P>(req.u_other));
    }
    server.verify(db, valid[0], opt.n);  // warm the sk^n cache
    for (std::size_t i = 1; i < T; ++i) {
        VerifyOutcome out{};
        verify.push_back(time_ms([&] { out = server.verify(db, valid[i], opt.n); }));
        if (out != VerifyOutcome::Accepted) throw Error("bench: valid merge redemption rejected");
    }

    const auto bytes = measure_merge_bytes(secret_bytes(keys.sk), opt.n);
    table.rows = {
        {"ServerSetup", summarize(setup), bytes.setup},
        {"Issue", summarize(issue_t), bytes.issue},
        {"ServerPunch", summarize(spunch), bytes.server_punch},
        {"ClientPunch", summarize(cpunch), bytes.client_punch},
        {"ClientRedeem", summarize(credeem), bytes.client_redeem},
        {"ServerVerify", summarize(verify), 0},
    };
    return table;
}

std::vector<ScalingRow> bench_verify_scaling(const std::vector<std::size_t>& sizes, std::size_t trials,
                                             std::uint16_t n, std::uint64_t seed) {
    using G = MainGroup;
    require_trials(trials);
    auto rng = make_rng(seed);
    PunchServer<G> server(ServerKeys<G>::generate(rng));
    const auto sk_n = server.cache().get(n);

    std::vector<RedeemDb> dbs;
    dbs.reserve(sizes.size());
    for (auto size : sizes) dbs.push_back(prefilled_db(size, rng));

    std::vector<std::vector<RedeemRequest<G>>> requests(sizes.size(), std::vector<RedeemRequest<G>>(trials));
    for (auto& per_size : requests)
        for (auto& req : per_size) {
            req.u = rng.bytes<32>();
            req.p = G::exp(card_base<G>(req.u), sk_n);
        }

    std::vector<std::vector<double>> samples(sizes.size());
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            const std::size_t s = (t + k) % sizes.size();
            VerifyOutcome out{};
            const auto& req = requests[s][t];
            samples[s].push_back(1000.0 * time_ms([&] { out = server.verify(dbs[s], req, n); }));
            if (out != VerifyOutcome::Accepted) throw Error("bench: valid redemption rejected");
        }
    }

    std::vector<ScalingRow> rows;
    for (std::size_t s = 0; s < sizes.size(); ++s) rows.push_back({sizes[s], summarize(samples[s])});
    return rows;
}

std::string scaling_to_text(const std::vector<ScalingRow>& rows) {
    std::string out = fmt::format("{:>12} {:>12} {:>12} {:>8}\n", "DB size", "Mean (us)", "Stddev (us)", "Trials");
    double lo = 0, hi = 0;
    for (const auto& r : rows) {
        out += fmt::format("{:>12} {:>12.2f} {:>12.2f} {:>8}\n", r.db_size, r.us.mean, r.us.stddev, r.us.count);
        lo = lo == 0 ? r.us.mean : std::min(lo, r.us.mean);
        hi = std::max(hi, r.us.mean);
    }
    if (lo > 0) out += fmt::format("max/min mean ratio: {:.3f}\n", hi / lo);
    return out;
}

std::string scaling_to_csv(const std::vector<ScalingRow>& rows) {
    std::string out = "db_size,trials,mean_us,stddev_us\n";
    for (const auto& r : rows) out += fmt::format("{},{},{:.4f},{:.4f}\n", r.db_size, r.us.count, r.us.mean, r.us.stddev);
    return out;
}

std::string ParallelResult::to_text() const {
    return fmt::format(
        "{} threads: {} cycles, {} accepted in {:.3f} s ({:.1f} cycles/s); same request redeemed {} times "
        "concurrently, {} accepted\n",
        threads, cycles, accepted, seconds, seconds > 0 ? static_cast<double>(cycles) / seconds : 0.0,
        contended_attempts, contended_accepts);
}

ParallelResult bench_parallel(unsigned threads, std::size_t cycles_per_thread, std::uint16_t n) {
    if (threads == 0) threads = 1;
    auto rng = Rng::system();
    const auto keys = ServerKeys<MainGroup>::generate(rng);
    server::Service service(bench_config(Scheme::Main, n), RedeemDb::in_memory(), secret_bytes(keys.sk));
    const auto pk = service.public_key();

    ParallelResult result;
    result.threads = threads;
    std::atomic<std::size_t> accepted{0};
    const auto start = Clock::now();
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                server::LoopbackTransport loop(service);
                auto wallet = client::Wallet::in_memory();
                wallet.set_public_key(Scheme::Main, pk);
                for (std::size_t c = 0; c < cycles_per_thread; ++c) {
                    const auto id = wallet.new_card(Scheme::Main);
                    for (std::uint16_t i = 0; i < n; ++i) wallet.punch(id, loop);
                    if (wallet.redeem(id, loop, n) == VerifyOutcome::Accepted) accepted.fetch_add(1);
                }
            });
    }
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.cycles = threads * cycles_per_thread;
    result.accepted = accepted.load();

    // Contended redemption of one request.
    auto [secret, card] = issue<MainGroup>(rng);
    for (std::uint16_t i = 0; i < n; ++i)
        std::tie(secret, card) = client_punch<MainGroup>(keys.pk, secret, card, server_punch<MainGroup>(keys, card.p, rng), rng);
    const auto frame =
        wire::make_redeem_request(wire::MsgType::RedeemReq, client_redeem<MainGroup>(secret, card).serialize(), n);
    std::atomic<std::size_t> contended_accepts{0};
    std::barrier sync(static_cast<std::ptrdiff_t>(threads));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                sync.arrive_and_wait();
                const auto reply = service.handle(frame);
                if (reply.type == wire::MsgType::RedeemResp && reply.body.size() == 1 && reply.body[0] == 0)
                    contended_accepts.fetch_add(1);
            });
    }
    result.contended_attempts = threads;
    result.contended_accepts = contended_accepts.load();
    return result;
}

}  // namespace punchcard::bench
