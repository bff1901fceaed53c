#include <benchmark/benchmark.h>

#include "ringtally/analysis.hpp"
#include "ringtally/bigmod.hpp"
#include "ringtally/params.hpp"
#include "ringtally/protocol.hpp"

using namespace ringtally;

static void BM_Modpow(benchmark::State& state) {
  Rng rng(1);
  const auto bits = static_cast<unsigned>(state.range(0));
  const Natural n = bigmod::random_prime(bits / 2, 1, 2, rng) * bigmod::random_prime(bits - bits / 2, 1, 2, rng);
  const Natural base = rng.below(n);
  const Natural exp = rng.below(n);
  for (auto _ : state) benchmark::DoNotOptimize(bigmod::modpow(base, exp, n));
}
BENCHMARK(BM_Modpow)->Arg(64)->Arg(512)->Arg(2048);

static void BM_GenBucketParams(benchmark::State& state) {
  Rng rng(2);
  const auto bits = static_cast<unsigned>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(gen_bucket_params(1, 20, params::PrimeMode::kRandom, bits, rng));
}
BENCHMARK(BM_GenBucketParams)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_RunTally(benchmark::State& state) {
  protocol::TallySettings settings;
  settings.ring_size = static_cast<std::size_t>(state.range(0));
  settings.bucket_count = static_cast<std::size_t>(state.range(1));
  std::vector<protocol::Secret> secrets;
  for (std::size_t i = 0; i < settings.ring_size; ++i)
    secrets.push_back(protocol::Secret::in_bucket(static_cast<BucketId>(1 + i % settings.bucket_count)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(protocol::run_tally(settings, secrets, ++seed));
}
BENCHMARK(BM_RunTally)->Args({20, 100})->Args({5, 10})->Unit(benchmark::kMillisecond);

static void BM_PohligHellman(benchmark::State& state) {
  const Natural p = 257, q = 65537, n = p * q;
  const Natural g = 3;
  const Natural h = bigmod::modpow(g, 40000, n);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::pohlig_hellman_pow2(g, h, n, p, q));
}
BENCHMARK(BM_PohligHellman);

static void BM_BruteForceLog(benchmark::State& state) {
  const Natural p = 257, q = 65537, n = p * q;
  const Natural g = 3;
  const Natural h = bigmod::modpow(g, 40000, n);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::discrete_log_bruteforce(g, h, n, 1u << 17));
}
BENCHMARK(BM_BruteForceLog)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
