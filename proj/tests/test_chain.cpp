// Inverse-limit chains over nested intervals.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ldom/chain.hpp"
#include "ldom/errors.hpp"

namespace {

using namespace ldom;

double diff(const SampledFn& a, const SampledFn& b) { return sup_norm(lin_comb(1.0, a, -1.0, b)); }

TEST(KwSequence, IntervalLevelsNestAndIslandsSeparate) {
  const auto seq = make_interval_sequence(3, 16);
  ASSERT_EQ(seq.size(), 3u);
  for (std::size_t n = 0; n < 3; ++n) {
    const auto* k = seq.levels()[n]->as<Interval>();
    EXPECT_EQ(k->a, -static_cast<double>(n + 1));
    EXPECT_EQ(k->b, static_cast<double>(n + 1));
    const auto* isl = seq.islands()[n]->as<Interval>();
    EXPECT_EQ(isl->a, 2.0 * (n + 1));
    EXPECT_EQ(isl->b, 2.0 * (n + 1) + 1);
  }
  // K_1 = [-1,1] sits in K_2 = [-2,2] starting one unit in.
  EXPECT_EQ(seq.nesting(0).front(), 16u);
  EXPECT_EQ(seq.nesting(0).size(), seq.levels()[0]->site_count());
  EXPECT_THROW(make_interval_sequence(0), ParameterError);
}

TEST(KwSequence, RejectsOverlappingIslandsAndBrokenNesting) {
  auto k1 = CompactDomain::interval(-1, 1, 5);
  auto k2 = CompactDomain::interval(-2, 2, 9);
  auto host = CompactDomain::interval(0, 6, 25);
  EXPECT_THROW(KwSequence({k1, k2}, host, {CompactDomain::interval(2, 3, 5), CompactDomain::interval(3, 4, 9)}),
               StructuralError);
  EXPECT_THROW(KwSequence({k1, CompactDomain::interval(-2, 2, 6)}, host,
                          {CompactDomain::interval(2, 3, 5), CompactDomain::interval(4, 5, 6)}),
               StructuralError);
}

TEST(Coherence, RestrictionsAreCoherentAndPerturbationsAreNot) {
  const auto seq = make_interval_sequence(3);
  auto t = restrict_family(seq, [](double x) { return std::sin(x); });
  EXPECT_TRUE(coherence_check(t, seq));
  std::vector<double> v(t.components[1].values().begin(), t.components[1].values().end());
  v[seq.nesting(0)[5]] += 0.1;
  t.components[1] = SampledFn(seq.levels()[1], v);
  EXPECT_FALSE(coherence_check(t, seq));
  EXPECT_NEAR(coherence_defect(t, seq), 0.1, 1e-12);
}

TEST(Coherence, FamiliesBuiltByExtensionAreCoherent) {
  const auto seq = make_interval_sequence(3, 8);
  const auto maps = default_chain_maps(seq);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  ChainElement t;
  std::vector<double> v(seq.levels()[0]->site_count());
  for (double& x : v) x = u(rng);
  t.components.emplace_back(seq.levels()[0], v);
  for (std::size_t n = 1; n < seq.size(); ++n) {
    auto next = maps.extenders[n - 1].extend(t.components.back());
    std::vector<double> w(next.values().begin(), next.values().end());
    const auto& a = seq.nesting(n - 1);
    for (std::size_t s = 0; s < w.size(); ++s) {
      if (std::find(a.begin(), a.end(), s) == a.end()) w[s] += u(rng);
    }
    t.components.emplace_back(seq.levels()[n], std::move(w));
  }
  EXPECT_TRUE(coherence_check(t, seq));
}

TEST(Chain, ZeroMapsToZero) {
  const auto seq = make_interval_sequence(3);
  const auto chain = build_chain(seq, default_chain_maps(seq));
  for (const auto& c : chain.apply(SampledFn::zeros(seq.host())).components) EXPECT_EQ(sup_norm(c), 0.0);
  ChainElement zero;
  for (const auto& k : seq.levels()) zero.components.push_back(SampledFn::zeros(k));
  EXPECT_EQ(sup_norm(lift_chain(zero, chain)), 0.0);
}

TEST(Chain, ComponentsFollowTheRecursion) {
  const auto seq = make_interval_sequence(3);
  const auto maps = default_chain_maps(seq);
  const auto chain = build_chain(seq, maps);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(seq.host()->site_count());
  for (double& x : v) x = u(rng);
  const SampledFn g(seq.host(), v);
  const auto out = chain.apply(g);
  ASSERT_EQ(out.components.size(), 3u);
  EXPECT_LE(diff(out.components[0], maps.level_maps[0].apply(restrict(g, seq.islands()[0]))), 0.0);
  for (std::size_t n = 1; n < 3; ++n) {
    const auto expect = lin_comb(1.0, maps.extenders[n - 1].extend(out.components[n - 1]), 1.0,
                                 maps.level_maps[n].apply(restrict(g, seq.islands()[n])));
    EXPECT_LE(diff(out.components[n], expect), 1e-15);
  }
  // Extension property: every output is coherent, site by site.
  EXPECT_LE(coherence_defect(out, seq), 1e-9);
}

TEST(Chain, RoundTripOnGlobalFamilies) {
  for (std::size_t levels : {std::size_t{1}, std::size_t{3}, std::size_t{4}}) {
    const auto seq = make_interval_sequence(levels);
    const auto chain = build_chain(seq, default_chain_maps(seq));
    for (const auto& f : std::vector<std::function<double(double)>>{
             [](double x) { return std::sin(x); }, [](double x) { return x * x; }, [](double) { return 1.0; }}) {
      const auto t = restrict_family(seq, f);
      const auto g = lift_chain(t, chain);
      const auto back = chain.apply(g);
      const double ref = sup_norm(t.components.back());
      for (std::size_t n = 0; n < levels; ++n) EXPECT_LE(diff(back.components[n], t.components[n]), 0.05 * ref);
    }
  }
}

TEST(Chain, LiftRejectsIncoherentTargets) {
  const auto seq = make_interval_sequence(2);
  const auto chain = build_chain(seq, default_chain_maps(seq));
  auto t = restrict_family(seq, [](double x) { return x; });
  t.components[1] = SampledFn::constant(seq.levels()[1], 5.0);
  EXPECT_THROW(chain.lift(t), ContractViolation);
}

TEST(Chain, MismatchedMapsAreRejected) {
  const auto seq = make_interval_sequence(3);
  auto maps = default_chain_maps(seq);
  maps.extenders.pop_back();
  EXPECT_THROW(build_chain(seq, maps), StructuralError);
  auto swapped = default_chain_maps(seq);
  std::swap(swapped.level_maps[1], swapped.level_maps[2]);
  EXPECT_THROW(build_chain(seq, swapped), StructuralError);
}

TEST(Chain, JsonListsLevelsAndFiles) {
  const auto j = chain_json(make_interval_sequence(2), "chain_");
  EXPECT_EQ(j["levels"].size(), 2u);
  EXPECT_EQ(j["components"][1]["file"], "chain_2.csv");
  EXPECT_EQ(j["host"]["b"], 6.0);
}

}  // namespace
