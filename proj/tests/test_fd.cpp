// Space descriptors, fd-height, construction plans, gluing and realization.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ldom/corpus.hpp"
#include "ldom/errors.hpp"
#include "ldom/fd.hpp"

namespace {

using namespace ldom;
using Kind = SpaceDescriptor::Kind;

// Height by plain iteration of derive, independent of fd_height.
int derive_count(SpaceDescriptor d) {
  int k = 0;
  while (!d.is_empty()) {
    d = derive(d);
    ++k;
  }
  return k;
}

TEST(Descriptor, ParsesAndPrintsCanonically) {
  EXPECT_EQ(to_string(parse_descriptor("FD(3)")), "FD(3)");
  EXPECT_EQ(to_string(parse_descriptor(" Omega( [ FD(*) ] , FD(0) ) ")), "Omega([FD(*)], FD(0))");
  EXPECT_EQ(parse_descriptor("F2"), build_F(2));
  EXPECT_EQ(parse_descriptor("F(3)"), build_F(3));
  EXPECT_EQ(parse_descriptor("Empty"), SpaceDescriptor::empty());
  for (int k = 1; k <= 5; ++k) EXPECT_EQ(parse_descriptor(to_string(build_F(k))), build_F(k));
}

TEST(Descriptor, ParseErrorsCarryPositions) {
  try {
    parse_descriptor("Omega([F(2)");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 11u);
  }
  EXPECT_THROW(parse_descriptor("FD(x)"), ParseError);
  EXPECT_THROW(parse_descriptor("FD(2) junk"), ParseError);
  EXPECT_THROW(parse_descriptor(""), ParseError);
  EXPECT_THROW(parse_descriptor("Omega([], FD(0))"), ParseError);
  EXPECT_THROW(parse_descriptor("F(0)"), ParseError);
}

TEST(Descriptor, OmegaRejectsEmptyBlocks) {
  EXPECT_THROW(SpaceDescriptor::omega({}, SpaceDescriptor::fd(0)), StructuralError);
  EXPECT_THROW(SpaceDescriptor::omega({SpaceDescriptor::empty()}, SpaceDescriptor::fd(0)), StructuralError);
}

TEST(Derive, WorkedExamples) {
  EXPECT_EQ(derive(SpaceDescriptor::fd(5)), SpaceDescriptor::empty());
  EXPECT_EQ(derive(build_F(2)), SpaceDescriptor::fd(0));
  const auto d3 = derive(build_F(3));
  EXPECT_EQ(d3, SpaceDescriptor::omega({SpaceDescriptor::fd(0)}, build_F(2)));
  EXPECT_EQ(derive(d3), SpaceDescriptor::fd(0));
  EXPECT_EQ(derive(SpaceDescriptor::empty()), SpaceDescriptor::empty());
}

TEST(FdHeight, BuildFMatchesIndex) {
  for (int k = 1; k <= 6; ++k) {
    EXPECT_EQ(fd_height(build_F(k)), (HeightResult{true, k}));
    EXPECT_EQ(derive_count(build_F(k)), k);
  }
  EXPECT_EQ(fd_height(SpaceDescriptor::fd(3)).to_string(), "Finite(1)");
  EXPECT_EQ(fd_height(SpaceDescriptor::empty()).value, 0);
}

TEST(FdHeight, DeriveDropsHeightByOne) {
  const std::vector<std::string> exprs{"F(5)", "Omega([F(2)], F(3))", "Omega([FD(1), FD(4)], FD(0))",
                                       "Omega([FD(*), F(3)], F(2))", "Omega([Omega([FD(2)], FD(1))], FD(0))"};
  for (const auto& text : exprs) {
    auto d = parse_descriptor(text);
    int h = fd_height(d).value;
    EXPECT_EQ(h, derive_count(d)) << text;
    while (!d.is_empty()) {
      d = derive(d);
      EXPECT_EQ(fd_height(d).value, --h) << text;
    }
  }
  EXPECT_EQ(fd_height(parse_descriptor("Omega([F(2)], F(3))")).value, 4);
}

TEST(FdHeight, DepthLimitIsReported) {
  const auto r = fd_height(build_F(6), 3);
  EXPECT_FALSE(r.finite);
  EXPECT_EQ(r.value, 3);
  EXPECT_EQ(r.to_string(), "ExceededDepth(3)");
}

TEST(OmegaBlock, CyclesThroughKinds) {
  const auto d = parse_descriptor("Omega([FD(*), FD(0)], FD(0))");
  EXPECT_EQ(omega_block(d, 1), SpaceDescriptor::fd(1));
  EXPECT_EQ(omega_block(d, 2), SpaceDescriptor::fd(0));
  EXPECT_EQ(omega_block(d, 3), SpaceDescriptor::fd(3));
  EXPECT_EQ(omega_block(build_F(2), 4), SpaceDescriptor::fd(4));
}

TEST(Plan, BaseCaseIsSingleKolmogorovNode) {
  const auto p = plan(SpaceDescriptor::fd(2));
  EXPECT_EQ(p->kind, PlanKind::KolmogorovBase);
  EXPECT_EQ(p->constant, Rational(8));
  EXPECT_TRUE(p->children.empty());
}

TEST(Plan, RootConstantIsEightToTheHeight) {
  const auto f2 = plan(build_F(2));
  EXPECT_EQ(f2->kind, PlanKind::PairSplit);
  EXPECT_EQ(f2->constant, Rational(64));
  EXPECT_EQ(plan(build_F(3))->constant, Rational(512));
  for (int k = 2; k <= 6; ++k) EXPECT_EQ(plan(build_F(k))->constant, pow(Rational(8), static_cast<unsigned>(k)));
  EXPECT_EQ(plan(parse_descriptor("Omega([F(2)], F(3))"))->constant, Rational(4096));
}

TEST(Plan, ComposeNodesMultiplyChildren) {
  std::function<void(const PlanPtr&)> walk = [&](const PlanPtr& n) {
    if (n->kind == PlanKind::Compose) {
      Rational prod(1);
      for (const auto& c : n->children) prod = prod * c->constant;
      EXPECT_EQ(n->constant, prod);
    }
    for (const auto& c : n->children) walk(c);
  };
  for (int k = 2; k <= 4; ++k) walk(plan(build_F(k)));
}

TEST(Plan, F2TreeShape) {
  const auto p = plan(build_F(2), {3});
  ASSERT_EQ(p->children.size(), 2u);
  const auto& left = p->children[0];
  EXPECT_EQ(left->kind, PlanKind::Compose);
  ASSERT_EQ(left->children.size(), 2u);
  EXPECT_EQ(left->children[0]->kind, PlanKind::NormalizeAtZero);
  const auto& glue = left->children[1];
  EXPECT_EQ(glue->kind, PlanKind::BlockGlue);
  ASSERT_EQ(glue->children.size(), 3u);
  EXPECT_EQ(glue->children[0]->constant, Rational(1));
  EXPECT_EQ(glue->children[1]->constant, Rational(8));
  EXPECT_EQ(glue->children[2]->constant, Rational(8));
  EXPECT_EQ(p->children[1]->kind, PlanKind::PointEvaluation);

  const auto j = to_json(*p);
  EXPECT_EQ(j["kind"], "PairSplit");
  EXPECT_EQ(j["constant"], "64");
  EXPECT_EQ(j["children"].size(), 2u);
  EXPECT_EQ(render_tree(*p).substr(0, 15), "PairSplit  c=64");
}

TEST(Plan, RejectsEmpty) { EXPECT_THROW(plan(SpaceDescriptor::empty()), UnsupportedInput); }

TEST(RealizeSpace, SupportedShapes) {
  const auto k = realize_space(build_F(2), 3);
  const auto* tbs = k->as<TruncatedBlockSum>();
  ASSERT_NE(tbs, nullptr);
  ASSERT_EQ(tbs->blocks.size(), 3u);
  EXPECT_EQ(tbs->blocks[0].dim, 1u);
  EXPECT_EQ(tbs->blocks[2].dim, 3u);
  EXPECT_TRUE(k->infinity_site().has_value());
  EXPECT_THROW(realize_space(build_F(3), 3), UnsupportedInput);
  EXPECT_THROW(realize(plan(build_F(3))), UnsupportedInput);
}

class GlueTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    std::vector<CGoodMap> maps;
    for (int d = 1; d <= 3; ++d) maps.push_back(realize(plan(SpaceDescriptor::fd(d))));
    gd_ = std::make_unique<GlueData>(make_glue(realize_space(build_F(2), 3), std::move(maps)));
  }
  static void TearDownTestSuite() { gd_.reset(); }

  static SampledFn random_source(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> v(gd_->source->site_count());
    for (double& x : v) x = u(rng);
    v[0] = 0.0;
    return SampledFn(gd_->source, std::move(v));
  }

  static inline std::unique_ptr<GlueData> gd_;
};

TEST_F(GlueTest, IntervalsAndPartition) {
  const std::vector<std::pair<double, double>> expect{{0.75, 1.0}, {0.375, 0.5}, {0.1875, 0.25}};
  ASSERT_EQ(gd_->intervals.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto* iv = gd_->intervals[i]->as<Interval>();
    EXPECT_DOUBLE_EQ(iv->a, expect[i].first);
    EXPECT_DOUBLE_EQ(iv->b, expect[i].second);
    if (i > 0) {
      EXPECT_LT(iv->b, gd_->intervals[i - 1]->as<Interval>()->a);
    }
  }
  const std::size_t inf = *gd_->space->infinity_site();
  for (std::size_t s = 0; s < gd_->space->site_count(); ++s) {
    double total = 0;
    for (const auto& p : gd_->partition) {
      EXPECT_TRUE(p[s] == 0.0 || p[s] == 1.0);
      total += p[s];
    }
    EXPECT_EQ(total, s == inf ? 0.0 : 1.0);
  }
  EXPECT_EQ(gd_->constant, Rational(8));
}

TEST_F(GlueTest, ApplyRespectsSupportsAndNorm) {
  EXPECT_EQ(sup_norm(glue_apply(*gd_, SampledFn::zeros(gd_->source))), 0.0);

  const auto* i2 = gd_->intervals[1]->as<Interval>();
  const auto bump = SampledFn::sample(gd_->source, [&](auto x) {
    return i2->contains(x[0], 0.0) ? std::sin(8 * x[0]) + 2 : 0.0;
  });
  const auto out = glue_apply(*gd_, bump);
  for (std::size_t b : {std::size_t{0}, std::size_t{2}}) EXPECT_EQ(sup_norm(block_values(out, b)), 0.0);
  EXPECT_GT(sup_norm(block_values(out, 1)), 0.0);
  EXPECT_EQ(out[*gd_->space->infinity_site()], 0.0);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const auto g = random_source(rng);
    EXPECT_LE(sup_norm(glue_apply(*gd_, g)), sup_norm(g) * (1 + 1e-9));
  }
}

TEST_F(GlueTest, LiftRoundTripsOnBlockCorpus) {
  for (const auto& f : block_corpus(gd_->space)) {
    const auto g = glue_lift(*gd_, f);
    EXPECT_EQ(g[0], 0.0);
    EXPECT_LE(sup_norm(g), 8 * 1.1 * sup_norm(f));
    EXPECT_LE(sup_norm(lin_comb(1.0, glue_apply(*gd_, g), -1.0, f)), 0.05 * sup_norm(f));
  }
}

TEST_F(GlueTest, LiftOfBlockOneIsSupportedNearI1) {
  std::vector<double> v(gd_->space->site_count(), 0.0);
  for (std::size_t s = 0; s < gd_->space->block_size(0); ++s) v[s] = 0.5;
  const auto g = glue_lift(*gd_, SampledFn(gd_->space, v));
  const auto* src = gd_->source->as<Interval>();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (src->site(i) <= 0.25) {
      EXPECT_EQ(g[i], 0.0) << src->site(i);
    }
  }
}

TEST_F(GlueTest, PreconditionsAreEnforced) {
  std::vector<double> v(gd_->space->site_count(), 0.1);
  EXPECT_THROW(glue_lift(*gd_, SampledFn(gd_->space, v)), ContractViolation);  // nonzero at infinity
  v.back() = 0.0;
  EXPECT_THROW(glue_lift(*gd_, SampledFn(gd_->space, v)), ContractViolation);  // heavy tail
  EXPECT_THROW(glue_apply(*gd_, SampledFn::constant(gd_->source, 1.0)), ContractViolation);
  EXPECT_THROW(make_glue(gd_->space, {gd_->block_maps[0]}), StructuralError);
}

TEST(Realize, FiniteDimensionalLeavesPassVerification) {
  for (int d : {0, 1, 2}) {
    const auto L = realize(plan(SpaceDescriptor::fd(d)));
    EXPECT_EQ(L.constant(), plan(SpaceDescriptor::fd(d))->constant);
    const auto& target = L.target().domain;
    const auto corpus = d == 0 ? std::vector<SampledFn>{SampledFn::constant(target, 1.0)} : standard_corpus(target);
    const auto report = verify_cgood(L, corpus);
    EXPECT_TRUE(report.pass) << "FD(" << d << ")";
  }
}

}  // namespace
