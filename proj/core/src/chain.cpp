#include "ldom/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ldom/errors.hpp"

namespace ldom {

namespace {

const Interval& interval_of(const DomainPtr& d, const char* what) {
  const auto* iv = d->as<Interval>();
  if (!iv) throw StructuralError(std::string(what) + " must be an interval, got " + d->describe());
  return *iv;
}

void require_level(const SampledFn& f, const DomainPtr& level, std::size_t n) {
  if (!same_domain(f.domain_ptr(), level)) {
    throw StructuralError("chain component " + std::to_string(n + 1) + " is not on level " + std::to_string(n + 1));
  }
}

}  // namespace

KwSequence::KwSequence(std::vector<DomainPtr> levels, DomainPtr host, std::vector<DomainPtr> islands)
    : levels_(std::move(levels)), host_(std::move(host)), islands_(std::move(islands)) {
  if (levels_.empty()) throw StructuralError("k_omega sequence needs at least one level");
  if (islands_.size() != levels_.size()) throw StructuralError("k_omega sequence needs one island per level");
  const Interval& h = interval_of(host_, "host");
  std::vector<const Interval*> iv;
  for (const auto& d : islands_) {
    iv.push_back(&interval_of(d, "island"));
    if (!h.contains(iv.back()->a) || !h.contains(iv.back()->b)) throw StructuralError("island outside the host window");
  }
  std::vector<const Interval*> sorted = iv;
  std::sort(sorted.begin(), sorted.end(), [](const Interval* x, const Interval* y) { return x->a < y->a; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i]->a > sorted[i - 1]->b)) throw StructuralError("islands must be disjoint with positive gaps");
  }
  for (std::size_t n = 0; n + 1 < levels_.size(); ++n) {
    std::vector<std::size_t> sites;
    for (std::size_t s = 0; s < levels_[n]->site_count(); ++s) {
      const auto at = levels_[n + 1]->locate(levels_[n]->coords(s));
      if (!at) throw StructuralError("level " + std::to_string(n + 1) + " is not a sub-grid of level " + std::to_string(n + 2));
      sites.push_back(*at);
    }
    nesting_.push_back(std::move(sites));
  }
}

KwSequence make_interval_sequence(std::size_t levels, std::size_t per_unit) {
  if (levels < 1) throw ParameterError("need at least one level");
  if (per_unit < 1) throw ParameterError("need at least one site per unit");
  std::vector<DomainPtr> ks;
  std::vector<DomainPtr> islands;
  std::size_t common = 1;
  for (std::size_t n = 1; n <= levels; ++n) {
    const double r = static_cast<double>(n);
    const std::size_t steps = 2 * n * per_unit;
    ks.push_back(CompactDomain::interval(-r, r, steps + 1));
    islands.push_back(CompactDomain::interval(2.0 * r, 2.0 * r + 1.0, steps + 1));
    common = std::lcm(common, steps);
  }
  const double top = 2.0 * static_cast<double>(levels) + 2.0;
  auto host = CompactDomain::interval(0.0, top, common * (2 * levels + 2) + 1);
  return KwSequence(std::move(ks), std::move(host), std::move(islands));
}

ChainElement restrict_family(const KwSequence& seq, const std::function<double(double)>& f) {
  ChainElement out;
  for (const auto& level : seq.levels()) {
    out.components.push_back(SampledFn::sample(level, [&](std::span<const double> x) { return f(x[0]); }));
  }
  return out;
}

ChainMaps default_chain_maps(const KwSequence& seq) {
  ChainMaps maps;
  maps.level_maps.push_back(affine_map(seq.islands()[0], seq.levels()[0]));
  for (std::size_t n = 1; n < seq.size(); ++n) {
    Extender e = dugundji_extender(seq.levels()[n], seq.levels()[n - 1]);
    maps.level_maps.push_back(compose(affine_map(seq.islands()[n], seq.levels()[n]), split_projection(e)));
    maps.extenders.push_back(std::move(e));
  }
  return maps;
}

ChainOperator::ChainOperator(KwSequence seq, ChainMaps maps) : seq_(std::move(seq)), maps_(std::move(maps)) {
  if (maps_.level_maps.size() != seq_.size() || maps_.extenders.size() + 1 != seq_.size()) {
    throw StructuralError("chain: need one level map per level and one extender between consecutive levels");
  }
  for (std::size_t n = 0; n < seq_.size(); ++n) {
    const CGoodMap& L = maps_.level_maps[n];
    if (!same_domain(L.source().domain, seq_.islands()[n]) || !L.source().vanishing.empty()) {
      throw StructuralError("chain: level map " + std::to_string(n + 1) + " does not start from its island");
    }
    std::vector<std::size_t> a = n == 0 ? std::vector<std::size_t>{} : seq_.nesting(n - 1);
    std::sort(a.begin(), a.end());
    if (!(L.target() == Space(seq_.levels()[n], a))) {
      throw StructuralError("chain: level map " + std::to_string(n + 1) + " does not target C(K_n+1; K_n)");
    }
  }
  for (std::size_t n = 0; n + 1 < seq_.size(); ++n) {
    const Extender& e = maps_.extenders[n];
    if (!same_domain(e.host(), seq_.levels()[n + 1]) || !same_domain(e.subset(), seq_.levels()[n]) ||
        e.a_sites() != seq_.nesting(n)) {
      throw StructuralError("chain: extender " + std::to_string(n + 1) + " does not extend K_n into K_n+1");
    }
  }
}

ChainElement ChainOperator::apply(const SampledFn& g) const {
  if (!same_domain(g.domain_ptr(), seq_.host())) throw StructuralError("chain: g is not on the host window");
  ChainElement out;
  for (std::size_t n = 0; n < seq_.size(); ++n) {
    SampledFn local = maps_.level_maps[n].apply(restrict(g, seq_.islands()[n]));
    if (n > 0) local = lin_comb(1.0, maps_.extenders[n - 1].extend(out.components.back()), 1.0, local);
    out.components.push_back(std::move(local));
  }
  return out;
}

SampledFn ChainOperator::lift(const ChainElement& target, double tol) const {
  if (target.components.size() != seq_.size()) throw StructuralError("chain: component count does not match levels");
  for (std::size_t n = 0; n < seq_.size(); ++n) require_level(target.components[n], seq_.levels()[n], n);
  const double defect = coherence_defect(target, seq_);
  if (defect > tol) throw ContractViolation("chain: incoherent target (defect " + std::to_string(defect) + ")");

  std::vector<SampledFn> pieces;
  pieces.push_back(maps_.level_maps[0].lift(target.components[0]));
  for (std::size_t n = 1; n < seq_.size(); ++n) {
    const Extender& e = maps_.extenders[n - 1];
    const SampledFn& f = target.components[n];
    SampledFn rest = lin_comb(1.0, f, -1.0, e.extend(e.trace(f)));
    pieces.push_back(maps_.level_maps[n].lift(rest));
  }
  return assemble_piecewise(pieces, *seq_.host()->as<Interval>());
}

ChainOperator build_chain(const KwSequence& seq, const ChainMaps& maps) { return ChainOperator(seq, maps); }

SampledFn lift_chain(const ChainElement& target, const ChainOperator& chain, double tol) {
  return chain.lift(target, tol);
}

double coherence_defect(const ChainElement& target, const KwSequence& seq) {
  if (target.components.size() != seq.size()) throw StructuralError("chain: component count does not match levels");
  double defect = 0.0;
  for (std::size_t n = 0; n + 1 < seq.size(); ++n) {
    require_level(target.components[n], seq.levels()[n], n);
    require_level(target.components[n + 1], seq.levels()[n + 1], n + 1);
    const auto& sites = seq.nesting(n);
    for (std::size_t s = 0; s < sites.size(); ++s) {
      defect = std::max(defect, std::abs(target.components[n + 1][sites[s]] - target.components[n][s]));
    }
  }
  return defect;
}

bool coherence_check(const ChainElement& target, const KwSequence& seq, double tol) {
  return coherence_defect(target, seq) <= tol;
}

namespace {

nlohmann::json domain_json(const DomainPtr& d) {
  if (const auto* iv = d->as<Interval>()) return {{"a", iv->a}, {"b", iv->b}, {"res", iv->res}};
  return {{"domain", d->describe()}, {"sites", d->site_count()}};
}

}  // namespace

nlohmann::json chain_json(const KwSequence& seq, const std::string& prefix) {
  nlohmann::json levels = nlohmann::json::array();
  nlohmann::json islands = nlohmann::json::array();
  nlohmann::json components = nlohmann::json::array();
  for (std::size_t n = 0; n < seq.size(); ++n) {
    levels.push_back(domain_json(seq.levels()[n]));
    islands.push_back(domain_json(seq.islands()[n]));
    components.push_back({{"level", n + 1}, {"file", prefix + std::to_string(n + 1) + ".csv"}});
  }
  return {{"host", domain_json(seq.host())},
          {"levels", std::move(levels)},
          {"islands", std::move(islands)},
          {"components", std::move(components)}};
}

}  // namespace ldom
