#include <benchmark/benchmark.h>

#include <random>

#include "ldom/cgood.hpp"
#include "ldom/chain.hpp"
#include "ldom/corpus.hpp"
#include "ldom/fd.hpp"
#include "ldom/kst.hpp"

namespace {

using namespace ldom;

void BM_InnerFamilyBuild(benchmark::State& state) {
  const auto params = make_params(2, Rational(2));
  const auto res = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(InnerFamily::build(params, {res}));
  state.SetLabel("n=2 c=2");
}
BENCHMARK(BM_InnerFamilyBuild)->Arg(17)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

void BM_DecomposeStep(benchmark::State& state) {
  const auto inner = InnerFamily::build(make_params(2, Rational(2)), {static_cast<std::size_t>(state.range(0))});
  const auto f = SampledFn::sample(inner->cube(), named_function("sinsin"));
  for (auto _ : state) benchmark::DoNotOptimize(decompose_step(f, *inner));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.size()));
}
BENCHMARK(BM_DecomposeStep)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const auto inner = InnerFamily::build(make_params(2, Rational(2)), {65});
  const auto f = SampledFn::sample(inner->cube(), named_function("xy"));
  const StopRule stop{static_cast<std::size_t>(state.range(0)), 0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(decompose(f, *inner, stop));
}
BENCHMARK(BM_Decompose)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_KolmogorovApply(benchmark::State& state) {
  const auto L = kolmogorov_map(InnerFamily::build(make_params(2, Rational(2)), {65}));
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(L.source().domain->site_count());
  for (double& x : v) x = u(rng);
  const SampledFn g(L.source().domain, std::move(v));
  for (auto _ : state) benchmark::DoNotOptimize(L.apply(g));
}
BENCHMARK(BM_KolmogorovApply)->Unit(benchmark::kMillisecond);

void BM_KolmogorovLift(benchmark::State& state) {
  const auto inner = InnerFamily::build(make_params(2, Rational(2)), {65});
  const auto L = kolmogorov_map(inner);
  const auto f = SampledFn::sample(inner->cube(), named_function("sumsq"));
  for (auto _ : state) benchmark::DoNotOptimize(L.lift(f));
}
BENCHMARK(BM_KolmogorovLift)->Unit(benchmark::kMillisecond);

void BM_DugundjiExtender(benchmark::State& state) {
  const auto host = CompactDomain::cube(2, static_cast<std::size_t>(state.range(0)));
  std::vector<std::size_t> a;
  for (std::size_t s = 0; s < host->site_count(); s += 7) a.push_back(s);
  for (auto _ : state) benchmark::DoNotOptimize(dugundji_extender(host, a));
}
BENCHMARK(BM_DugundjiExtender)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_PlanF(benchmark::State& state) {
  const auto d = build_F(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(plan(d));
}
BENCHMARK(BM_PlanF)->DenseRange(2, 6, 2);

void BM_ChainLift(benchmark::State& state) {
  const auto seq = make_interval_sequence(static_cast<std::size_t>(state.range(0)));
  const auto chain = build_chain(seq, default_chain_maps(seq));
  const auto t = restrict_family(seq, [](double x) { return x * x; });
  for (auto _ : state) benchmark::DoNotOptimize(chain.lift(t));
}
BENCHMARK(BM_ChainLift)->Arg(3)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
