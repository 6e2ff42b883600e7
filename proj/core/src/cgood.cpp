#include "ldom/cgood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ldom/errors.hpp"

namespace ldom {

namespace {

constexpr std::size_t kNeighbours = 4;

struct Span1d {
  double a;
  double b;
};

Span1d span_of(const CompactDomain& d, const char* what) {
  if (const auto* iv = d.as<Interval>()) return {iv->a, iv->b};
  if (const auto* c = d.as<Cube>(); c && c->dim == 1) return {0.0, 1.0};
  throw StructuralError(std::string(what) + ": expected an interval or a 1-cube, got " + d.describe());
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Extender build_extender(DomainPtr host, DomainPtr subset, std::vector<std::size_t> a_sites) {
  if (a_sites.empty()) throw ParameterError("extender: the closed set A is empty");
  const std::size_t sites = host->site_count();
  std::vector<std::int64_t> position(sites, -1);
  for (std::size_t i = 0; i < a_sites.size(); ++i) {
    if (a_sites[i] >= sites) throw StructuralError("extender: A-site out of range");
    if (position[a_sites[i]] >= 0) throw StructuralError("extender: duplicate A-site");
    position[a_sites[i]] = static_cast<std::int64_t>(i);
  }

  std::vector<std::size_t> row_start{0};
  std::vector<Extender::Entry> entries;
  row_start.reserve(sites + 1);
  auto push = [&](std::size_t a_index, double w) {
    entries.push_back({static_cast<std::uint32_t>(a_index), w});
  };

  const bool one_dim = host->coord_count() == 1 && !host->as<TruncatedBlockSum>();
  if (one_dim) {
    std::vector<std::pair<double, std::size_t>> at;  // (coordinate, index in A)
    for (std::size_t i = 0; i < a_sites.size(); ++i) at.emplace_back(host->coords(a_sites[i])[0], i);
    std::sort(at.begin(), at.end());
    for (std::size_t s = 0; s < sites; ++s) {
      if (position[s] >= 0) {
        push(static_cast<std::size_t>(position[s]), 1.0);
      } else {
        const double x = host->coords(s)[0];
        const auto hi = std::lower_bound(at.begin(), at.end(), std::make_pair(x, std::size_t{0}));
        if (hi == at.begin()) {
          push(hi->second, 1.0);
        } else if (hi == at.end()) {
          push(std::prev(hi)->second, 1.0);
        } else {
          const auto lo = std::prev(hi);
          const double dl = x - lo->first;
          const double dr = hi->first - x;
          // Inverse-distance weights of the two bracketing sites.
          push(lo->second, dr / (dl + dr));
          push(hi->second, dl / (dl + dr));
        }
      }
      row_start.push_back(entries.size());
    }
  } else {
    std::vector<std::vector<double>> a_pos;
    a_pos.reserve(a_sites.size());
    for (std::size_t i : a_sites) a_pos.push_back(host->ambient(i));
    std::vector<std::pair<double, std::size_t>> dist(a_sites.size());
    for (std::size_t s = 0; s < sites; ++s) {
      if (position[s] >= 0) {
        push(static_cast<std::size_t>(position[s]), 1.0);
      } else {
        const auto x = host->ambient(s);
        for (std::size_t i = 0; i < a_pos.size(); ++i) {
          double d2 = 0.0;
          for (std::size_t p = 0; p < x.size(); ++p) d2 += (x[p] - a_pos[i][p]) * (x[p] - a_pos[i][p]);
          dist[i] = {std::sqrt(d2), i};
        }
        const std::size_t k = std::min(kNeighbours, dist.size());
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) total += 1.0 / dist[j].first;
        for (std::size_t j = 0; j < k; ++j) push(dist[j].second, (1.0 / dist[j].first) / total);
      }
      row_start.push_back(entries.size());
    }
  }
  return Extender(std::move(host), std::move(subset), std::move(a_sites), std::move(row_start), std::move(entries));
}

void require_domain(const SampledFn& f, const DomainPtr& d, const std::string& who) {
  if (!same_domain(f.domain_ptr(), d)) {
    throw StructuralError(who + ": function lives on " + f.domain().describe() + ", expected " + d->describe());
  }
}

double max_on(const SampledFn& f, const std::vector<std::size_t>& sites) {
  double m = 0.0;
  for (std::size_t s : sites) m = std::max(m, std::abs(f[s]));
  return m;
}

}  // namespace

Space::Space(DomainPtr d, std::vector<std::size_t> a) : domain(std::move(d)), vanishing(sorted_unique(std::move(a))) {
  if (!domain) throw StructuralError("Space: missing domain");
  if (!vanishing.empty() && vanishing.back() >= domain->site_count()) {
    throw StructuralError("Space: vanishing site out of range");
  }
}

bool operator==(const Space& x, const Space& y) {
  return x.vanishing == y.vanishing && same_domain(x.domain, y.domain);
}

CGoodMap::CGoodMap(std::string id, Rational c, Space source, Space target, LinearOp apply, LinearOp lift, PlanPtr plan)
    : id_(std::move(id)),
      c_(c),
      source_(std::move(source)),
      target_(std::move(target)),
      apply_(std::move(apply)),
      lift_(std::move(lift)),
      plan_(std::move(plan)) {
  if (c_ < Rational(1)) throw ParameterError("c-good constant must be >= 1, got " + c_.to_string());
  if (!apply_ || !lift_) throw StructuralError("c-good map " + id_ + ": missing operator");
}

SampledFn CGoodMap::apply(const SampledFn& g) const {
  require_domain(g, source_.domain, id_ + ".apply");
  return apply_(g);
}

SampledFn CGoodMap::lift(const SampledFn& f) const {
  require_domain(f, target_.domain, id_ + ".lift");
  const double bad = max_on(f, target_.vanishing);
  if (bad > 1e-9 * std::max(1.0, sup_norm(f))) {
    throw ContractViolation(id_ + ".lift: input does not vanish on A (|f| = " + std::to_string(bad) + ")");
  }
  return lift_(f);
}

CGoodMap CGoodMap::relabel(std::string id, PlanPtr plan, std::optional<Rational> constant) const {
  CGoodMap out = *this;
  out.id_ = std::move(id);
  out.plan_ = std::move(plan);
  if (constant) {
    if (*constant < c_) {
      throw ParameterError("relabel: constant " + constant->to_string() + " below the proven " + c_.to_string());
    }
    out.c_ = *constant;
  }
  return out;
}

Extender::Extender(DomainPtr host, DomainPtr subset, std::vector<std::size_t> a_sites,
                   std::vector<std::size_t> row_start, std::vector<Entry> entries)
    : host_(std::move(host)),
      subset_(std::move(subset)),
      a_sites_(std::move(a_sites)),
      row_start_(std::move(row_start)),
      entries_(std::move(entries)) {
  if (subset_->site_count() != a_sites_.size()) throw StructuralError("extender: subset size mismatch");
  if (row_start_.size() != host_->site_count() + 1) throw StructuralError("extender: weight table size mismatch");
}

std::span<const Extender::Entry> Extender::row(std::size_t host_site) const {
  return std::span<const Entry>(entries_).subspan(row_start_.at(host_site),
                                                  row_start_.at(host_site + 1) - row_start_[host_site]);
}

SampledFn Extender::extend(const SampledFn& on_a) const {
  require_domain(on_a, subset_, "extend");
  std::vector<double> out(host_->site_count());
  for (std::size_t s = 0; s < out.size(); ++s) {
    double v = 0.0;
    for (std::size_t k = row_start_[s]; k < row_start_[s + 1]; ++k) v += entries_[k].weight * on_a[entries_[k].a_index];
    out[s] = v;
  }
  // Sites of A copy their value exactly, without rounding through weights.
  for (std::size_t i = 0; i < a_sites_.size(); ++i) out[a_sites_[i]] = on_a[i];
  return SampledFn(host_, std::move(out));
}

SampledFn Extender::trace(const SampledFn& on_host) const {
  require_domain(on_host, host_, "trace");
  std::vector<double> out(a_sites_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = on_host[a_sites_[i]];
  return SampledFn(subset_, std::move(out));
}

Extender dugundji_extender(DomainPtr host, std::vector<std::size_t> a_sites) {
  if (a_sites.empty()) throw ParameterError("extender: the closed set A is empty");
  a_sites = sorted_unique(std::move(a_sites));
  auto subset = CompactDomain::subset(host, a_sites);
  return build_extender(std::move(host), std::move(subset), std::move(a_sites));
}

Extender dugundji_extender(DomainPtr host, DomainPtr subset) {
  std::vector<std::size_t> a_sites;
  if (const auto* ss = subset->as<SiteSubset>(); ss && same_domain(ss->parent, host)) {
    a_sites = ss->sites;
  } else {
    a_sites.reserve(subset->site_count());
    for (std::size_t i = 0; i < subset->site_count(); ++i) {
      const auto x = subset->coords(i);
      const auto site = host->locate(x);
      if (!site) throw DomainError("extender: site " + std::to_string(i) + " of " + subset->describe() + " is not a site of " + host->describe());
      a_sites.push_back(*site);
    }
  }
  return build_extender(std::move(host), std::move(subset), std::move(a_sites));
}

Extender dugundji_extender(DomainPtr host, DomainPtr subset, std::vector<std::size_t> a_sites) {
  return build_extender(std::move(host), std::move(subset), std::move(a_sites));
}

Extender identity_extender(DomainPtr domain) {
  const std::size_t n = domain->site_count();
  std::vector<std::size_t> a_sites(n);
  std::iota(a_sites.begin(), a_sites.end(), std::size_t{0});
  std::vector<std::size_t> row_start(n + 1);
  std::iota(row_start.begin(), row_start.end(), std::size_t{0});
  std::vector<Extender::Entry> entries(n);
  for (std::size_t i = 0; i < n; ++i) entries[i] = {static_cast<std::uint32_t>(i), 1.0};
  return Extender(domain, domain, std::move(a_sites), std::move(row_start), std::move(entries));
}

SampledFn PairSplit::forward(const SampledFn& g, const SampledFn& h) const {
  return lin_comb(1.0, g, 1.0, e_.extend(h));
}

std::pair<SampledFn, SampledFn> PairSplit::inverse(const SampledFn& f) const {
  SampledFn on_a = e_.trace(f);
  SampledFn rest = lin_comb(1.0, f, -1.0, e_.extend(on_a));
  return {std::move(rest), std::move(on_a)};
}

PairSplit pair_split(Extender e) { return PairSplit(std::move(e)); }

CGoodMap split_projection(const Extender& e) {
  auto ext = std::make_shared<const Extender>(e);
  Space source(e.host());
  Space target(e.host(), e.a_sites());
  return CGoodMap(
      "projection", Rational(2), source, target,
      [ext](const SampledFn& f) { return scale(0.5, lin_comb(1.0, f, -1.0, ext->extend(ext->trace(f)))); },
      [](const SampledFn& f) { return scale(2.0, f); },
      make_plan(PlanKind::Projection, Rational(2), {}, {{"a_sites", e.a_sites().size()}}));
}

CGoodMap normalize_at_zero(DomainPtr interval) {
  const Span1d span = span_of(*interval, "normalize_at_zero");
  return CGoodMap(
      "normalize", Rational(2), Space(interval), Space(interval, {0}),
      [](const SampledFn& g) {
        std::vector<double> out(g.values().begin(), g.values().end());
        const double g0 = g[0];
        for (double& v : out) v = 0.5 * (v - g0);
        return SampledFn(g.domain_ptr(), std::move(out));
      },
      [](const SampledFn& f) { return scale(2.0, f); },
      make_plan(PlanKind::NormalizeAtZero, Rational(2), {}, {{"interval", {span.a, span.b}}}));
}

CGoodMap affine_map(DomainPtr source, DomainPtr target) {
  const Span1d s = span_of(*source, "affine_map source");
  const Span1d t = span_of(*target, "affine_map target");
  auto transfer = [](const SampledFn& g, const DomainPtr& onto, Span1d from, Span1d to) {
    std::vector<double> out(onto->site_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double y = onto->coords(i)[0];
      const double x = from.a + (y - to.a) / (to.b - to.a) * (from.b - from.a);
      out[i] = eval(g, {std::clamp(x, from.a, from.b)});
    }
    return SampledFn(onto, std::move(out));
  };
  return CGoodMap(
      "affine", Rational(1), Space(source), Space(target),
      [=](const SampledFn& g) { return transfer(g, target, s, t); },
      [=](const SampledFn& f) { return transfer(f, source, t, s); },
      make_plan(PlanKind::IdentityBase, Rational(1), {}, {{"source", {s.a, s.b}}, {"target", {t.a, t.b}}}));
}

CGoodMap reparametrize(const CGoodMap& L, DomainPtr interval) {
  return compose(affine_map(std::move(interval), L.source().domain), L);
}

CGoodMap point_evaluation_map(DomainPtr interval, double at, DomainPtr point, Rational recorded) {
  const Span1d span = span_of(*interval, "point_evaluation_map");
  if (point->site_count() != 1) throw StructuralError("point_evaluation_map: target must have exactly one site");
  if (at < span.a || at > span.b) throw DomainError("point_evaluation_map: evaluation point outside the interval");
  return CGoodMap(
      "evaluate", recorded, Space(interval), Space(point),
      [point, at](const SampledFn& g) { return SampledFn(point, {eval(g, {at})}); },
      [interval](const SampledFn& f) { return SampledFn::constant(interval, f[0]); },
      make_plan(PlanKind::PointEvaluation, recorded, {}, {{"at", at}}));
}

CGoodMap compose(const CGoodMap& L1, const CGoodMap& L2) {
  if (!(L1.target() == L2.source())) {
    throw StructuralError("compose: target of " + L1.id() + " (" + L1.target().domain->describe() +
                          ") is not the source of " + L2.id() + " (" + L2.source().domain->describe() + ")");
  }
  std::vector<PlanPtr> children;
  for (const auto* L : {&L1, &L2}) {
    if (L->plan()) children.push_back(L->plan());
  }
  const Rational c = L1.constant() * L2.constant();
  return CGoodMap(
      L2.id() + "*" + L1.id(), c, L1.source(), L2.target(),
      [L1, L2](const SampledFn& g) { return L2.apply(L1.apply(g)); },
      [L1, L2](const SampledFn& f) { return L1.lift(L2.lift(f)); },
      make_plan(PlanKind::Compose, c, std::move(children)));
}

CGoodMap restrict_extend(const CGoodMap& L, const Extender& e1, const Extender& e2) {
  if (!same_domain(e1.subset(), L.source().domain)) {
    throw StructuralError("restrict_extend: e1 does not extend from the source of " + L.id());
  }
  if (!same_domain(e2.host(), L.target().domain)) {
    throw StructuralError("restrict_extend: e2 does not extend into the target of " + L.id());
  }
  std::vector<std::size_t> a1;
  for (std::size_t s : L.source().vanishing) a1.push_back(e1.a_sites().at(s));
  std::vector<std::size_t> a2;
  for (std::size_t s : L.target().vanishing) {
    const auto& sites = e2.a_sites();
    const auto it = std::find(sites.begin(), sites.end(), s);
    if (it == sites.end()) throw StructuralError("restrict_extend: A2 is not contained in the restricted target");
    a2.push_back(static_cast<std::size_t>(it - sites.begin()));
  }
  auto x1 = std::make_shared<const Extender>(e1);
  auto x2 = std::make_shared<const Extender>(e2);
  std::vector<PlanPtr> children;
  if (L.plan()) children.push_back(L.plan());
  return CGoodMap(
      L.id() + "'", L.constant(), Space(e1.host(), std::move(a1)), Space(e2.subset(), std::move(a2)),
      [L, x1, x2](const SampledFn& g) { return x2->trace(L.apply(x1->trace(g))); },
      [L, x1, x2](const SampledFn& f) { return x1->extend(L.lift(x2->extend(f))); },
      make_plan(PlanKind::RestrictExtend, L.constant(), std::move(children)));
}

std::vector<Interval> default_subintervals(int m) {
  if (m < 0) throw ParameterError("default_subintervals: m must be >= 0");
  std::vector<Interval> out;
  const double w = 1.0 / static_cast<double>(2 * m + 2);
  for (int q = 0; q <= m; ++q) out.push_back({2 * q * w, (2 * q + 1) * w, 2});
  return out;
}

CGoodMap kolmogorov_map(const InnerPtr& inner, const KolmogorovOptions& options) {
  if (!inner) throw StructuralError("kolmogorov_map: missing inner family");
  const KstParams& p = inner->params();
  const std::size_t pieces = static_cast<std::size_t>(p.m + 1);
  std::vector<Interval> sub = options.subintervals.empty() ? default_subintervals(p.m) : options.subintervals;
  if (sub.size() != pieces) {
    throw StructuralError("kolmogorov_map: need " + std::to_string(pieces) + " subintervals, got " +
                          std::to_string(sub.size()));
  }
  {
    std::vector<Interval> sorted = sub;
    std::sort(sorted.begin(), sorted.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (!(sorted[i].a < sorted[i].b) || sorted[i].a < 0.0 || sorted[i].b > 1.0) {
        throw StructuralError("kolmogorov_map: subintervals must be non-trivial and inside [0,1]");
      }
      if (i > 0 && !(sorted[i].a > sorted[i - 1].b)) throw StructuralError("kolmogorov_map: subintervals overlap");
    }
  }
  if (options.refinement < 1) throw ParameterError("kolmogorov_map: refinement must be >= 1");

  const std::size_t steps = (inner->univariate()->site_count() - 1) * options.refinement;
  auto source = CompactDomain::interval(0.0, 1.0, 2 * pieces * steps + 1);
  const DomainPtr& target = inner->cube();
  const double inv = 1.0 / static_cast<double>(pieces);

  auto apply = [inner, sub, inv](const SampledFn& g) {
    const std::size_t sites = inner->cube()->site_count();
    std::vector<double> out(sites, 0.0);
    for (std::size_t q = 0; q < sub.size(); ++q) {
      const SampledFn& phi = inner->phi(static_cast<int>(q));
      const double a = sub[q].a;
      const double w = sub[q].b - sub[q].a;
      for (std::size_t s = 0; s < sites; ++s) out[s] += eval(g, {a + w * phi[s]});
    }
    for (double& v : out) v *= inv;
    return SampledFn(inner->cube(), std::move(out));
  };

  auto lift = [inner, sub, source, options, pieces](const SampledFn& f) {
    const Decomposition dec =
        decompose(scale(static_cast<double>(pieces), f), *inner, options.stop, options.slack);
    std::vector<std::size_t> order(sub.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sub[x].a < sub[y].a; });

    const Interval& grid = *source->as<Interval>();
    std::vector<double> out(grid.res);
    std::size_t k = 0;  // index into order of the first piece not entirely left of x
    for (std::size_t i = 0; i < grid.res; ++i) {
      const double x = grid.site(i);
      while (k < order.size() && x > sub[order[k]].b + 1e-12) ++k;
      if (k == order.size()) {
        out[i] = eval(dec.g[order.back()], {1.0});
        continue;
      }
      const Interval& piece = sub[order[k]];
      const SampledFn& gq = dec.g[order[k]];
      if (x >= piece.a - 1e-12) {
        out[i] = eval(gq, {std::clamp((x - piece.a) / (piece.b - piece.a), 0.0, 1.0)});
      } else if (k == 0) {
        out[i] = eval(gq, {0.0});
      } else {
        const Interval& left = sub[order[k - 1]];
        const double t = (x - left.b) / (piece.a - left.b);
        out[i] = (1.0 - t) * eval(dec.g[order[k - 1]], {1.0}) + t * eval(gq, {0.0});
      }
    }
    return SampledFn(source, std::move(out));
  };

  return CGoodMap("kolmogorov(n=" + std::to_string(p.n) + ",c=" + p.c.to_string() + ")", p.c, Space(source),
                  Space(target), std::move(apply), std::move(lift),
                  make_plan(PlanKind::KolmogorovBase, p.c, {}, to_json(p)));
}

const Check* VerifyReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

VerifyConfig VerifyConfig::with_slack(double slack) {
  VerifyConfig cfg;
  cfg.slack = slack;
  cfg.roundtrip_tol = slack / 2.0;
  return cfg;
}

VerifyReport verify_cgood(const CGoodMap& L, const std::vector<SampledFn>& corpus, const VerifyConfig& config) {
  VerifyReport report;
  report.map_id = L.id();
  report.constant = L.constant();

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Space& src = L.source();
  const Space& dst = L.target();
  auto random_source = [&] {
    std::vector<double> v(src.domain->site_count());
    for (double& x : v) x = unit(rng);
    for (std::size_t s : src.vanishing) v[s] = 0.0;
    return SampledFn(src.domain, std::move(v));
  };

  double norm_ratio = 0.0;
  double vanish = 0.0;
  double linear = 0.0;
  std::optional<SampledFn> prev;
  std::optional<SampledFn> prev_image;
  for (std::size_t i = 0; i < config.random_count; ++i) {
    SampledFn g = random_source();
    SampledFn image = L.apply(g);
    const double gn = sup_norm(g);
    if (gn > 0.0) norm_ratio = std::max(norm_ratio, sup_norm(image) / gn);
    vanish = std::max(vanish, max_on(image, dst.vanishing));
    if (prev && i % 10 == 1) {
      const double alpha = 0.75 - 0.01 * static_cast<double>(i);
      const double beta = -1.25;
      SampledFn mixed = L.apply(lin_comb(alpha, g, beta, *prev));
      SampledFn expected = lin_comb(alpha, image, beta, *prev_image);
      const double scale_ref = std::max(1.0, std::abs(alpha) * gn + std::abs(beta) * sup_norm(*prev));
      linear = std::max(linear, sup_norm(lin_comb(1.0, mixed, -1.0, expected)) / scale_ref);
    }
    prev = std::move(g);
    prev_image = std::move(image);
  }

  double roundtrip = 0.0;
  double kernel = 0.0;
  for (const auto& f : corpus) {
    const double fn = sup_norm(f);
    if (fn == 0.0) continue;
    SampledFn g = L.lift(f);
    kernel = std::max(kernel, sup_norm(g) / fn);
    roundtrip = std::max(roundtrip, sup_norm(lin_comb(1.0, L.apply(g), -1.0, f)) / fn);
  }

  const double c = L.constant().to_double();
  report.checks = {
      {"linearity", linear, config.linearity_tol, linear <= config.linearity_tol},
      {"norm", norm_ratio, 1.0 + config.norm_tol, norm_ratio <= 1.0 + config.norm_tol},
      {"vanishing", vanish, config.vanish_tol, vanish <= config.vanish_tol},
      {"round_trip", roundtrip, config.roundtrip_tol, roundtrip <= config.roundtrip_tol},
      {"small_kernel", kernel, c * (1.0 + config.slack), kernel <= c * (1.0 + config.slack)},
  };
  report.pass = std::all_of(report.checks.begin(), report.checks.end(), [](const Check& ch) { return ch.pass; });
  return report;
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"measured", c.measured}, {"bound", c.bound}, {"pass", c.pass}});
  }
  return {{"map_id", report.map_id},
          {"constant", report.constant.to_string()},
          {"checks", std::move(checks)},
          {"pass", report.pass}};
}

}  // namespace ldom
