#include <benchmark/benchmark.h>

#include "punchcard/mergeable.hpp"
#include "punchcard/punchcard.hpp"
#include "punchcard/scheme.hpp"

using namespace punchcard;

namespace {

using G = MainGroup;
using P = MergeGroups;

void BM_RistrettoExp(benchmark::State& state) {
    auto rng = Rng::seeded(1);
    const auto base = G::hash_to_group("bench", as_bytes("base"));
    const auto s = random_nonzero<G::Scalar>(rng);
    for (auto _ : state) benchmark::DoNotOptimize(G::exp(base, s));
}
BENCHMARK(BM_RistrettoExp);

void BM_RistrettoHashToGroup(benchmark::State& state) {
    auto rng = Rng::seeded(2);
    const auto u = rng.bytes<32>();
    for (auto _ : state) benchmark::DoNotOptimize(card_base<G>(u));
}
BENCHMARK(BM_RistrettoHashToGroup);

void BM_DleqProve(benchmark::State& state) {
    auto rng = Rng::seeded(3);
    const auto keys = ServerKeys<G>::generate(rng);
    const auto [secret, card] = issue<G>(rng);
    for (auto _ : state) benchmark::DoNotOptimize(server_punch<G>(keys, card.p, rng));
}
BENCHMARK(BM_DleqProve);

void BM_DleqVerify(benchmark::State& state) {
    auto rng = Rng::seeded(4);
    const auto keys = ServerKeys<G>::generate(rng);
    const auto [secret, card] = issue<G>(rng);
    const auto resp = server_punch<G>(keys, card.p, rng);
    for (auto _ : state) benchmark::DoNotOptimize(verify_punch<G>(keys.pk, card.p, resp));
}
BENCHMARK(BM_DleqVerify);

void BM_ServerVerify(benchmark::State& state) {
    auto rng = Rng::seeded(5);
    PunchServer<G> server(ServerKeys<G>::generate(rng));
    auto db = RedeemDb::in_memory();
    const auto sk_n = server.cache().get(10);
    std::vector<RedeemRequest<G>> reqs(4096);
    for (auto& r : reqs) {
        r.u = rng.bytes<32>();
        r.p = G::exp(card_base<G>(r.u), sk_n);
    }
    std::size_t i = 0;
    for (auto _ : state) {
        // Wraps after 4096: later rounds measure the double-spend path, same group work.
        benchmark::DoNotOptimize(server.verify(db, reqs[i++ % reqs.size()], 10));
    }
}
BENCHMARK(BM_ServerVerify);

void BM_RedeemDbInsert(benchmark::State& state) {
    auto rng = Rng::seeded(6);
    auto db = RedeemDb::in_memory();
    for (auto _ : state) {
        state.PauseTiming();
        const auto u = rng.bytes<32>();
        state.ResumeTiming();
        benchmark::DoNotOptimize(db.check_and_insert(u));
    }
}
BENCHMARK(BM_RedeemDbInsert);

void BM_G0Exp(benchmark::State& state) {
    auto rng = Rng::seeded(7);
    const auto base = P::G0::hash_to_group("bench", as_bytes("g0"));
    const auto s = random_nonzero<P::Scalar>(rng);
    for (auto _ : state) benchmark::DoNotOptimize(P::G0::exp(base, s));
}
BENCHMARK(BM_G0Exp);

void BM_G1Exp(benchmark::State& state) {
    auto rng = Rng::seeded(8);
    const auto base = P::G1::hash_to_group("bench", as_bytes("g1"));
    const auto s = random_nonzero<P::Scalar>(rng);
    for (auto _ : state) benchmark::DoNotOptimize(P::G1::exp(base, s));
}
BENCHMARK(BM_G1Exp);

void BM_Pairing(benchmark::State& state) {
    const auto a = P::G0::hash_to_group("bench", as_bytes("a"));
    const auto b = P::G1::hash_to_group("bench", as_bytes("b"));
    for (auto _ : state) benchmark::DoNotOptimize(P::pair(a, b));
}
BENCHMARK(BM_Pairing);

void BM_GtExp(benchmark::State& state) {
    auto rng = Rng::seeded(9);
    const auto x = P::GT::generator();
    const auto s = random_nonzero<P::Scalar>(rng);
    for (auto _ : state) benchmark::DoNotOptimize(P::GT::exp(x, s));
}
BENCHMARK(BM_GtExp);

}  // namespace

BENCHMARK_MAIN();
