#include "ldom/sampled_fn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ldom/errors.hpp"

namespace ldom {

namespace {

constexpr double kSnap = 1e-9;

struct AxisWeight {
  std::size_t lo = 0;
  double w = 0.0;  // weight of lo + 1
};

AxisWeight axis_weight(const Interval& iv, double x) {
  const double span = iv.b - iv.a;
  if (!iv.contains(x, 1e-9 * span)) {
    throw DomainError("point " + std::to_string(x) + " outside [" + std::to_string(iv.a) + ", " +
                      std::to_string(iv.b) + "]");
  }
  const double t = std::clamp((x - iv.a) / span, 0.0, 1.0) * static_cast<double>(iv.res - 1);
  const double r = std::round(t);
  if (std::abs(t - r) < kSnap) return {static_cast<std::size_t>(r), 0.0};
  auto lo = static_cast<std::size_t>(std::floor(t));
  lo = std::min(lo, iv.res - 2);
  return {lo, t - static_cast<double>(lo)};
}

double eval_cube(const Cube& c, std::span<const double> values, std::span<const double> x) {
  if (x.size() < c.dim) throw DomainError("point has too few coordinates for cube");
  if (c.dim == 0) return values[0];
  const Interval axis{0.0, 1.0, c.res};
  std::vector<AxisWeight> w(c.dim);
  for (std::size_t p = 0; p < c.dim; ++p) w[p] = axis_weight(axis, x[p]);
  double acc = 0.0;
  const std::size_t corners = std::size_t{1} << c.dim;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double weight = 1.0;
    std::size_t site = 0;
    for (std::size_t p = 0; p < c.dim; ++p) {
      const bool up = (mask >> (c.dim - 1 - p)) & 1U;
      weight *= up ? w[p].w : 1.0 - w[p].w;
      site = site * c.res + w[p].lo + (up ? 1 : 0);
    }
    if (weight != 0.0) acc += weight * values[site];
  }
  return acc;
}

double eval_interval(const Interval& iv, std::span<const double> values, double x) {
  const AxisWeight w = axis_weight(iv, x);
  if (w.w == 0.0) return values[w.lo];
  return (1.0 - w.w) * values[w.lo] + w.w * values[w.lo + 1];
}

}  // namespace

SampledFn::SampledFn(DomainPtr domain, std::vector<double> values) : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw StructuralError("SampledFn: missing domain");
  if (values_.size() != domain_->site_count()) {
    throw StructuralError("SampledFn: " + std::to_string(values_.size()) + " values for " +
                          std::to_string(domain_->site_count()) + " sites");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw StructuralError("SampledFn: non-finite value");
  }
}

SampledFn SampledFn::zeros(DomainPtr domain) { return constant(std::move(domain), 0.0); }

SampledFn SampledFn::constant(DomainPtr domain, double value) {
  const std::size_t n = domain->site_count();
  return SampledFn(std::move(domain), std::vector<double>(n, value));
}

SampledFn SampledFn::sample(DomainPtr domain, const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> v(domain->site_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = domain->coords(i);
    v[i] = fn(x);
  }
  return SampledFn(std::move(domain), std::move(v));
}

VanishingSet::VanishingSet(DomainPtr d, std::vector<std::size_t> s) : domain(std::move(d)), sites(std::move(s)) {
  if (!domain) throw StructuralError("VanishingSet: missing domain");
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  if (!sites.empty() && sites.back() >= domain->site_count()) {
    throw StructuralError("VanishingSet: site outside domain");
  }
}

double sup_norm(const SampledFn& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double eval(const SampledFn& f, std::span<const double> x) {
  const CompactDomain& d = f.domain();
  const auto values = f.values();
  if (const auto* iv = d.as<Interval>()) {
    if (x.size() != 1) throw DomainError("interval point needs one coordinate");
    return eval_interval(*iv, values, x[0]);
  }
  if (const auto* c = d.as<Cube>()) {
    if (x.size() != c->dim) throw DomainError("cube point has wrong dimension");
    return eval_cube(*c, values, x);
  }
  if (const auto* s = d.as<SubIntervalList>()) {
    if (x.size() != 1) throw DomainError("sub-interval point needs one coordinate");
    std::size_t offset = 0;
    for (const auto& p : s->pieces) {
      if (p.contains(x[0], 1e-9 * (p.b - p.a))) return eval_interval(p, values.subspan(offset, p.res), x[0]);
      offset += p.res;
    }
    for (std::size_t i = 0; i < s->anchors.size(); ++i) {
      if (std::abs(s->anchors[i] - x[0]) <= 1e-12) return values[offset + i];
    }
    throw DomainError("point " + std::to_string(x[0]) + " lies in a gap of the sub-interval list");
  }
  if (const auto* s = d.as<TruncatedBlockSum>()) {
    if (x.empty()) throw DomainError("block-sum point needs a block coordinate");
    if (std::isinf(x[0])) {
      const auto inf = d.infinity_site();
      if (!inf) throw DomainError("block sum has no infinity site");
      return values[*inf];
    }
    const long long n = std::llround(x[0]);
    if (n < 1 || static_cast<std::size_t>(n) > s->blocks.size()) throw DomainError("no such block");
    const Cube& c = s->blocks[n - 1];
    const std::size_t off = d.block_offset(n - 1);
    return eval_cube(c, values.subspan(off, cube_site_count(c)), x.subspan(1));
  }
  const auto site = d.locate(x, 1e-9);
  if (!site) throw DomainError("point is not a site of the finite set");
  return values[*site];
}

SampledFn lin_comb(double alpha, const SampledFn& f, double beta, const SampledFn& g) {
  if (!same_domain(f.domain_ptr(), g.domain_ptr())) throw StructuralError("lin_comb: domain mismatch");
  std::vector<double> v(f.size());
  const auto a = f.values();
  const auto b = g.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = alpha * a[i] + beta * b[i];
  return SampledFn(f.domain_ptr(), std::move(v));
}

SampledFn scale(double alpha, const SampledFn& f) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x *= alpha;
  return SampledFn(f.domain_ptr(), std::move(v));
}

SampledFn restrict(const SampledFn& f, const DomainPtr& sub) {
  if (same_domain(f.domain_ptr(), sub)) return SampledFn(sub, std::vector<double>(f.values().begin(), f.values().end()));
  if (const auto* s = sub->as<SiteSubset>(); s && same_domain(s->parent, f.domain_ptr())) {
    std::vector<double> v(s->sites.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[s->sites[i]];
    return SampledFn(sub, std::move(v));
  }
  if (f.domain().as<TruncatedBlockSum>()) {
    throw DomainError("restrict: block-sum functions restrict through block_values or a site subset");
  }
  std::vector<double> v(sub->site_count());
  try {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto x = sub->coords(i);
      v[i] = eval(f, x);
    }
  } catch (const DomainError& e) {
    throw DomainError(std::string("restrict: sub-domain not contained: ") + e.what());
  }
  return SampledFn(sub, std::move(v));
}

bool vanishes_on(const SampledFn& f, const VanishingSet& a, double tol) {
  if (!same_domain(f.domain_ptr(), a.domain)) throw StructuralError("vanishes_on: domain mismatch");
  return std::all_of(a.sites.begin(), a.sites.end(), [&](std::size_t s) { return std::abs(f[s]) <= tol; });
}

SampledFn assemble_piecewise(std::span<const SampledFn> pieces, const Interval& parent,
                             std::span<const std::pair<double, double>> anchors) {
  std::vector<const Interval*> iv(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    iv[i] = pieces[i].domain().as<Interval>();
    if (!iv[i]) throw StructuralError("assemble_piecewise: pieces must live on intervals");
    if (!parent.contains(iv[i]->a, 1e-12) || !parent.contains(iv[i]->b, 1e-12)) {
      throw StructuralError("assemble_piecewise: piece outside parent");
    }
  }
  std::vector<std::size_t> order(pieces.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return iv[x]->a < iv[y]->a; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!(iv[order[k]]->a > iv[order[k - 1]]->b)) throw StructuralError("assemble_piecewise: overlapping pieces");
  }

  std::vector<std::pair<double, double>> knots;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    knots.emplace_back(iv[i]->a, pieces[i].values().front());
    knots.emplace_back(iv[i]->b, pieces[i].values().back());
  }
  for (const auto& [x, v] : anchors) {
    if (!parent.contains(x, 1e-12)) throw StructuralError("assemble_piecewise: anchor outside parent");
    for (const auto* p : iv) {
      if (p->contains(x, 0.0)) throw StructuralError("assemble_piecewise: anchor inside a piece");
    }
    knots.emplace_back(x, v);
  }
  std::sort(knots.begin(), knots.end());

  std::vector<double> out(parent.res, 0.0);
  for (std::size_t i = 0; i < parent.res; ++i) {
    const double x = parent.site(i);
    // Last piece starting at or before x.
    auto it = std::upper_bound(order.begin(), order.end(), x,
                               [&](double value, std::size_t k) { return value < iv[k]->a - 1e-12; });
    if (it != order.begin()) {
      const std::size_t k = *(it - 1);
      if (x <= iv[k]->b + 1e-12) {
        const double xc = std::clamp(x, iv[k]->a, iv[k]->b);
        out[i] = eval(pieces[k], {xc});
        continue;
      }
    }
    if (knots.empty()) continue;
    auto right = std::lower_bound(knots.begin(), knots.end(), std::pair<double, double>{x, -INFINITY});
    if (right == knots.end()) {
      out[i] = knots.back().second;
    } else if (right == knots.begin() || right->first == x) {
      out[i] = right->second;
    } else {
      const auto left = right - 1;
      const double t = (x - left->first) / (right->first - left->first);
      out[i] = (1.0 - t) * left->second + t * right->second;
    }
  }
  return SampledFn(CompactDomain::interval(parent.a, parent.b, parent.res), std::move(out));
}

SampledFn assemble_piecewise(const SampledFn& on_pieces) {
  const auto* s = on_pieces.domain().as<SubIntervalList>();
  if (!s) throw StructuralError("assemble_piecewise: expected a sub-interval list domain");
  std::vector<SampledFn> pieces;
  std::size_t offset = 0;
  const auto values = on_pieces.values();
  for (const auto& p : s->pieces) {
    pieces.emplace_back(CompactDomain::interval(p.a, p.b, p.res),
                        std::vector<double>(values.begin() + offset, values.begin() + offset + p.res));
    offset += p.res;
  }
  std::vector<std::pair<double, double>> anchors;
  for (std::size_t i = 0; i < s->anchors.size(); ++i) anchors.emplace_back(s->anchors[i], values[offset + i]);
  return assemble_piecewise(pieces, s->parent, anchors);
}

SampledFn block_values(const SampledFn& f, std::size_t n) {
  const auto* s = f.domain().as<TruncatedBlockSum>();
  if (!s || n >= s->blocks.size()) throw StructuralError("block_values: not a block of a block sum");
  const Cube& c = s->blocks[n];
  const std::size_t off = f.domain().block_offset(n);
  const auto values = f.values();
  return SampledFn(CompactDomain::cube(c.dim, c.res),
                   std::vector<double>(values.begin() + off, values.begin() + off + cube_site_count(c)));
}

}  // namespace ldom
