// c-good maps, extension operators, the operator algebra and verification.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ldom/cgood.hpp"
#include "ldom/corpus.hpp"
#include "ldom/errors.hpp"
#include "ldom/kst.hpp"

namespace {

using namespace ldom;

SampledFn random_fn(const DomainPtr& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(d->site_count());
  for (double& x : v) x = u(rng);
  return SampledFn(d, std::move(v));
}

CGoodMap identity_map(const DomainPtr& d, Rational c = Rational(1)) {
  auto id = [](const SampledFn& f) { return f; };
  return CGoodMap("identity", c, Space(d), Space(d), id, id);
}

double diff(const SampledFn& a, const SampledFn& b) { return sup_norm(lin_comb(1.0, a, -1.0, b)); }

TEST(CGoodMap, RejectsConstantBelowOne) {
  const auto d = CompactDomain::interval(0, 1, 5);
  EXPECT_THROW(identity_map(d, Rational(1, 2)), ParameterError);
}

TEST(CGoodMap, ChecksDomainsAndVanishing) {
  const auto d = CompactDomain::interval(0, 1, 5);
  const auto L = normalize_at_zero(d);
  EXPECT_THROW(L.apply(SampledFn::zeros(CompactDomain::interval(0, 1, 6))), StructuralError);
  EXPECT_THROW(L.lift(SampledFn::constant(d, 1.0)), ContractViolation);
  EXPECT_NO_THROW(L.lift(SampledFn::sample(d, [](auto x) { return x[0]; })));
}

TEST(CGoodMap, RelabelNeverLowersTheConstant) {
  const auto L = identity_map(CompactDomain::interval(0, 1, 3), Rational(2));
  EXPECT_EQ(L.relabel("x", nullptr, Rational(8)).constant(), Rational(8));
  EXPECT_EQ(L.relabel("x", nullptr).constant(), Rational(2));
  EXPECT_THROW(L.relabel("x", nullptr, Rational(3, 2)), ParameterError);
}

TEST(Extender, ConstantsExtendToConstants) {
  const auto host = CompactDomain::interval(0, 1, 33);
  const auto e = dugundji_extender(host, std::vector<std::size_t>{3, 10, 20});
  const auto out = e.extend(SampledFn::constant(e.subset(), 3.0));
  for (std::size_t s = 0; s < out.size(); ++s) EXPECT_NEAR(out[s], 3.0, 1e-15);
}

TEST(Extender, EndpointsGiveLinearInterpolation) {
  const auto host = CompactDomain::interval(0, 1, 17);
  const auto e = dugundji_extender(host, std::vector<std::size_t>{0, 16});
  const auto out = e.extend(SampledFn(e.subset(), {0.0, 1.0}));
  for (std::size_t s = 0; s < out.size(); ++s) {
    EXPECT_GE(out[s], 0.0);
    EXPECT_LE(out[s], 1.0);
    EXPECT_NEAR(out[s], s / 16.0, 1e-15);
  }
}

TEST(Extender, InfinitySiteAloneForcesConstant) {
  const auto bs = CompactDomain::block_sum({{1, 5}, {2, 3}, {3, 2}});
  const std::size_t inf = *bs->infinity_site();
  const auto e = dugundji_extender(bs, std::vector<std::size_t>{inf});
  for (std::size_t s = 0; s < bs->site_count(); ++s) {
    double total = 0;
    for (const auto& entry : e.row(s)) total += entry.weight;
    EXPECT_NEAR(total, 1.0, 1e-15);
  }
  const auto out = e.extend(SampledFn(e.subset(), {0.7}));
  for (std::size_t s = 0; s < out.size(); ++s) EXPECT_DOUBLE_EQ(out[s], 0.7);
}

TEST(Extender, ConvexWeightsExactOnARangeContained) {
  std::mt19937_64 rng(11);
  for (const auto& host : {CompactDomain::interval(-2, 3, 41), CompactDomain::cube(2, 9),
                           CompactDomain::block_sum({{1, 4}, {2, 3}})}) {
    std::vector<std::size_t> all(host->site_count());
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::size_t> a(all.begin(), all.begin() + static_cast<long>(all.size() / 4 + 1));
    const auto e = dugundji_extender(host, a);
    for (std::size_t s = 0; s < host->site_count(); ++s) {
      double total = 0;
      for (const auto& entry : e.row(s)) {
        EXPECT_GE(entry.weight, 0.0);
        total += entry.weight;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
    for (int trial = 0; trial < 20; ++trial) {
      const auto h = random_fn(e.subset(), rng);
      const auto k = random_fn(e.subset(), rng);
      const auto out = e.extend(h);
      const auto [lo, hi] = std::minmax_element(h.values().begin(), h.values().end());
      for (std::size_t i = 0; i < e.a_sites().size(); ++i) EXPECT_EQ(out[e.a_sites()[i]], h[i]);
      for (std::size_t s = 0; s < out.size(); ++s) {
        EXPECT_GE(out[s], *lo - 1e-12);
        EXPECT_LE(out[s], *hi + 1e-12);
      }
      const auto lhs = e.extend(lin_comb(0.3, h, -1.7, k));
      EXPECT_LE(diff(lhs, lin_comb(0.3, out, -1.7, e.extend(k))), 1e-9);
      EXPECT_LE(diff(e.trace(out), h), 0.0);
    }
  }
}

TEST(Extender, LocatesSubdomainSitesByCoordinates) {
  const auto host = CompactDomain::interval(-2, 2, 65);
  const auto sub = CompactDomain::interval(-1, 1, 33);
  const auto e = dugundji_extender(host, sub);
  EXPECT_EQ(e.a_sites().front(), 16u);
  EXPECT_EQ(e.a_sites().back(), 48u);
  EXPECT_THROW(dugundji_extender(host, CompactDomain::interval(-1, 1, 34)), DomainError);
  EXPECT_THROW(dugundji_extender(host, std::vector<std::size_t>{}), ParameterError);
}

TEST(PairSplit, RoundTripsAndSplitsIntoVanishingPart) {
  std::mt19937_64 rng(5);
  const auto host = CompactDomain::cube(2, 9);
  const auto ps = pair_split(dugundji_extender(host, std::vector<std::size_t>{0, 8, 40, 72, 80}));
  for (int i = 0; i < 25; ++i) {
    const auto f = random_fn(host, rng);
    const auto [g, h] = ps.inverse(f);
    EXPECT_TRUE(vanishes_on(g, VanishingSet(host, ps.extender().a_sites()), 1e-15));
    EXPECT_LE(diff(ps.forward(g, h), f), 1e-9);
  }
}

TEST(SplitProjection, KillsConstantsAndLiftsByTwo) {
  const auto host = CompactDomain::interval(0, 1, 21);
  const auto P = split_projection(dugundji_extender(host, std::vector<std::size_t>{0, 10, 20}));
  EXPECT_EQ(P.constant(), Rational(2));
  EXPECT_EQ(sup_norm(P.apply(SampledFn::constant(host, 4.0))), 0.0);
  const auto f = SampledFn::sample(host, [](auto x) { return std::sin(10 * x[0]) * x[0] * (1 - x[0]); });
  const auto vanishing = P.apply(f);
  EXPECT_TRUE(vanishes_on(vanishing, P.target().vanishing_set(), 1e-15));
  EXPECT_LE(diff(P.apply(P.lift(vanishing)), vanishing), 1e-12);
  EXPECT_LE(sup_norm(P.lift(vanishing)), 2 * sup_norm(vanishing) + 1e-15);
}

TEST(NormalizeAtZero, VanishesAtLeftEnd) {
  const auto d = CompactDomain::interval(0, 1, 9);
  const auto L = normalize_at_zero(d);
  const auto out = L.apply(SampledFn::sample(d, [](auto x) { return 3 + x[0]; }));
  EXPECT_EQ(out[0], 0.0);
  EXPECT_DOUBLE_EQ(out[8], 0.5);
}

TEST(AffineMap, TransfersBetweenIntervals) {
  const auto a = CompactDomain::interval(0, 1, 17);
  const auto b = CompactDomain::interval(-3, 5, 33);
  const auto L = affine_map(a, b);
  const auto g = SampledFn::sample(a, [](auto x) { return x[0] * x[0]; });
  const auto out = L.apply(g);
  EXPECT_DOUBLE_EQ(out[0], 0.0);
  EXPECT_DOUBLE_EQ(out[32], 1.0);
  EXPECT_LE(diff(L.lift(out), g), 1e-12);
}

TEST(PointEvaluation, EvaluatesAndLiftsToConstants) {
  const auto d = CompactDomain::interval(0, 1, 5);
  const auto L = point_evaluation_map(d, 0.25, CompactDomain::point(), Rational(2));
  const auto out = L.apply(SampledFn::sample(d, [](auto x) { return 4 * x[0]; }));
  EXPECT_DOUBLE_EQ(out[0], 1.0);
  EXPECT_EQ(sup_norm(lin_comb(1.0, L.lift(out), -1.0, SampledFn::constant(d, 1.0))), 0.0);
  EXPECT_EQ(L.constant(), Rational(2));
}

TEST(Compose, ConstantsMultiplyExactly) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> num(1, 40);
  const auto d = CompactDomain::interval(0, 1, 3);
  for (int i = 0; i < 50; ++i) {
    const int a = num(rng), b = num(rng);
    const Rational c1 = Rational(a + b, a), c2 = Rational(b + 7, 7);
    const auto L = compose(identity_map(d, c1), identity_map(d, c2));
    EXPECT_EQ(L.constant(), c1 * c2);
    EXPECT_EQ(L.plan()->constant, c1 * c2);
  }
}

TEST(Compose, WithIdentityChangesNothing) {
  const auto d = CompactDomain::interval(0, 1, 9);
  const auto L = normalize_at_zero(d);
  auto id = [](const SampledFn& f) { return f; };
  const CGoodMap I("identity", Rational(1), L.target(), L.target(), id, id);
  const auto LI = compose(L, I);
  EXPECT_EQ(LI.constant(), L.constant());
  const auto g = SampledFn::sample(d, [](auto x) { return std::cos(x[0]); });
  EXPECT_EQ(diff(LI.apply(g), L.apply(g)), 0.0);
  EXPECT_THROW(compose(I, affine_map(CompactDomain::interval(0, 2, 9), d)), StructuralError);
}

TEST(RestrictExtend, PreservesConstantAndRoundTrips) {
  const auto k1 = CompactDomain::interval(0, 1, 33);
  const auto k2 = CompactDomain::interval(0, 2, 33);
  const auto L = compose(affine_map(k1, k2), split_projection(dugundji_extender(k2, std::vector<std::size_t>{0})));
  const auto k1p = CompactDomain::interval(-1, 2, 97);
  const auto k2p = CompactDomain::interval(0, 1, 17);
  const auto R = restrict_extend(L, dugundji_extender(k1p, k1), dugundji_extender(k2, k2p));
  EXPECT_EQ(R.constant(), L.constant());
  const auto report = verify_cgood(R, {SampledFn::sample(k2p, [](auto x) { return x[0] * x[0]; })});
  EXPECT_TRUE(report.pass);

  const auto same = restrict_extend(L, identity_extender(k1), identity_extender(k2));
  const auto g = SampledFn::sample(k1, [](auto x) { return std::exp(x[0]); });
  EXPECT_EQ(diff(same.apply(g), L.apply(g)), 0.0);
}

TEST(Verify, IdentityPassesAndDoubledIdentityFailsNorm) {
  const auto d = CompactDomain::cube(2, 9);
  const auto corpus = standard_corpus(d);
  const auto ok = verify_cgood(identity_map(d), corpus);
  EXPECT_TRUE(ok.pass);
  for (const auto& c : ok.checks) EXPECT_TRUE(c.pass) << c.name;

  auto twice = [](const SampledFn& f) { return scale(2.0, f); };
  auto half = [](const SampledFn& f) { return scale(0.5, f); };
  const auto bad = verify_cgood(CGoodMap("twice", Rational(1), Space(d), Space(d), twice, half), corpus);
  EXPECT_FALSE(bad.pass);
  ASSERT_NE(bad.find("norm"), nullptr);
  EXPECT_FALSE(bad.find("norm")->pass);
  EXPECT_NEAR(bad.find("norm")->measured, 2.0, 1e-12);
}

TEST(Verify, ReportsAreDeterministicForASeed) {
  const auto d = CompactDomain::interval(0, 1, 33);
  const auto L = normalize_at_zero(d);
  const std::vector<SampledFn> corpus{SampledFn::sample(d, [](auto x) { return x[0]; })};
  VerifyConfig cfg;
  cfg.seed = 42;
  EXPECT_EQ(to_json(verify_cgood(L, corpus, cfg)), to_json(verify_cgood(L, corpus, cfg)));
  const auto j = to_json(verify_cgood(L, corpus, cfg));
  EXPECT_EQ(j["constant"], "2");
  EXPECT_EQ(j["checks"].size(), 5u);
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("name") && c.contains("measured") && c.contains("bound") && c.contains("pass"));
  }
}

class KolmogorovMapTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    inner_ = InnerFamily::build(make_params(2, Rational(2)), {65});
    map_ = std::make_unique<CGoodMap>(kolmogorov_map(inner_));
  }
  static void TearDownTestSuite() {
    map_.reset();
    inner_.reset();
  }
  static inline InnerPtr inner_;
  static inline std::unique_ptr<CGoodMap> map_;
};

TEST_F(KolmogorovMapTest, ShapesAndConstant) {
  EXPECT_EQ(map_->constant(), Rational(2));
  const auto* src = map_->source().domain->as<Interval>();
  ASSERT_NE(src, nullptr);
  EXPECT_EQ(src->a, 0.0);
  EXPECT_EQ(src->b, 1.0);
  EXPECT_TRUE(same_domain(map_->target().domain, inner_->cube()));
  const auto iq = default_subintervals(9);
  ASSERT_EQ(iq.size(), 10u);
  EXPECT_DOUBLE_EQ(iq[0].b, 1.0 / 20.0);
  EXPECT_DOUBLE_EQ(iq[9].a, 18.0 / 20.0);
}

TEST_F(KolmogorovMapTest, LiftOfXyIsSmallAndRoundTrips) {
  const auto f = SampledFn::sample(inner_->cube(), named_function("xy"));
  const auto g = map_->lift(f);
  EXPECT_LE(sup_norm(g), 2 * 1.1 * sup_norm(f));
  EXPECT_LE(diff(map_->apply(g), f), 0.05 * sup_norm(f));
}

TEST_F(KolmogorovMapTest, ApplyIsContractive) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    const auto g = random_fn(map_->source().domain, rng);
    EXPECT_LE(sup_norm(map_->apply(g)), sup_norm(g) * (1 + 1e-9));
  }
}

TEST_F(KolmogorovMapTest, VerifyPassesAndZeroSlackFails) {
  const auto corpus = standard_corpus(inner_->cube());
  const auto report = verify_cgood(*map_, corpus);
  EXPECT_TRUE(report.pass);
  const auto strict = verify_cgood(*map_, corpus, VerifyConfig::with_slack(0.0));
  EXPECT_FALSE(strict.pass);
  EXPECT_FALSE(strict.find("round_trip")->pass);
}

}  // namespace
