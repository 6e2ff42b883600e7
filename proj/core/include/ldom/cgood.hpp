#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldom/kst.hpp"
#include "ldom/plan.hpp"
#include "ldom/rational.hpp"
#include "ldom/sampled_fn.hpp"

namespace ldom {

/// A function space C(K;A): a domain and the sites where functions vanish.
struct Space {
  DomainPtr domain;
  std::vector<std::size_t> vanishing;  // sorted site indices of A

  Space() = default;
  Space(DomainPtr d, std::vector<std::size_t> a = {});

  VanishingSet vanishing_set() const { return VanishingSet(domain, vanishing); }
  friend bool operator==(const Space& x, const Space& y);
};

using LinearOp = std::function<SampledFn(const SampledFn&)>;

/// A linear map L: C(K1;A1) -> C(K2;A2) with ||L|| <= 1 and a right inverse
/// `lift` satisfying ||lift(f)|| <= c||f||.
///
/// Copies share the underlying operators. apply/lift check that their input
/// lives on the right domain; lift also checks that it vanishes on A2.
class CGoodMap {
 public:
  CGoodMap(std::string id, Rational c, Space source, Space target, LinearOp apply, LinearOp lift,
           PlanPtr plan = nullptr);

  const std::string& id() const noexcept { return id_; }
  const Rational& constant() const noexcept { return c_; }
  const Space& source() const noexcept { return source_; }
  const Space& target() const noexcept { return target_; }
  const PlanPtr& plan() const noexcept { return plan_; }

  SampledFn apply(const SampledFn& g) const;
  SampledFn lift(const SampledFn& f) const;

  /// Same operators under a new id and plan node. The stored constant may
  /// only grow: a c-good map is c'-good for every c' >= c.
  CGoodMap relabel(std::string id, PlanPtr plan, std::optional<Rational> constant = std::nullopt) const;

 private:
  std::string id_;
  Rational c_;
  Space source_;
  Space target_;
  LinearOp apply_;
  LinearOp lift_;
  PlanPtr plan_;
};

/// Linear extension operator from functions on a closed subset A of `host`
/// to functions on `host`. Every host value is a fixed convex combination
/// of values on A; sites of A copy their own value.
class Extender {
 public:
  struct Entry {
    std::uint32_t a_index;  // position within A
    double weight;
  };

  Extender(DomainPtr host, DomainPtr subset, std::vector<std::size_t> a_sites, std::vector<std::size_t> row_start,
           std::vector<Entry> entries);

  const DomainPtr& host() const noexcept { return host_; }
  /// Domain that functions on A live on; its i-th site is host site a_sites()[i].
  const DomainPtr& subset() const noexcept { return subset_; }
  const std::vector<std::size_t>& a_sites() const noexcept { return a_sites_; }

  /// Weights defining the value at a host site.
  std::span<const Entry> row(std::size_t host_site) const;

  SampledFn extend(const SampledFn& on_a) const;
  /// f restricted to A, on the subset domain.
  SampledFn trace(const SampledFn& on_host) const;

 private:
  DomainPtr host_;
  DomainPtr subset_;
  std::vector<std::size_t> a_sites_;
  std::vector<std::size_t> row_start_;
  std::vector<Entry> entries_;
};

/// Inverse-distance extender. On one-dimensional hosts the weights use the two
/// A-sites bracketing each site (linear interpolation, constant beyond the
/// outermost A-site); otherwise the k = 4 nearest A-sites in the ambient
/// embedding. Throws ParameterError on empty A.
Extender dugundji_extender(DomainPtr host, std::vector<std::size_t> a_sites);

/// Same, with A given as a domain whose sites are located in `host` by
/// coordinates (SiteSubset domains use their site list directly). Throws
/// DomainError when a site of `subset` is not a site of `host`.
Extender dugundji_extender(DomainPtr host, DomainPtr subset);

/// Same, with an explicit correspondence: site i of `subset` is host site
/// a_sites[i].
Extender dugundji_extender(DomainPtr host, DomainPtr subset, std::vector<std::size_t> a_sites);

Extender identity_extender(DomainPtr domain);

/// C(K) = C(K;A) x C(A) via H(g,h) = g + e(h).
class PairSplit {
 public:
  explicit PairSplit(Extender e) : e_(std::move(e)) {}

  const Extender& extender() const noexcept { return e_; }
  SampledFn forward(const SampledFn& g, const SampledFn& h) const;
  /// (f - e(f|A), f|A)
  std::pair<SampledFn, SampledFn> inverse(const SampledFn& f) const;

 private:
  Extender e_;
};

PairSplit pair_split(Extender e);

/// The 2-good map C(K) -> C(K;A), f -> (f - e(f|A))/2, lift 2f.
CGoodMap split_projection(const Extender& e);

/// g -> (g - g(a))/2 from C(I) to C(I;{a}) on an interval domain; lift 2f.
CGoodMap normalize_at_zero(DomainPtr interval);

/// g -> g o h with h the increasing affine map from `target` onto `source`
/// (both intervals or 1-cubes). 1-good; lift(f) = f o h^-1 on source's grid.
CGoodMap affine_map(DomainPtr source, DomainPtr target);

/// L precomposed with the affine identification of `interval` and L's source.
CGoodMap reparametrize(const CGoodMap& L, DomainPtr interval);

/// g -> g(at) onto a one-site domain; lift is the constant function.
/// `recorded` is the constant stored for ledger purposes (>= 1).
CGoodMap point_evaluation_map(DomainPtr interval, double at, DomainPtr point, Rational recorded = Rational(1));

/// apply = L2.apply o L1.apply, lift = L1.lift o L2.lift, constant c1*c2.
/// Throws StructuralError unless L1.target == L2.source.
CGoodMap compose(const CGoodMap& L1, const CGoodMap& L2);

/// L': C(K1';A1) -> C(K2';A2) with L'(g) = L(g|K1)|K2' and
/// lift'(f) = e1(L.lift(e2(f))). e1 extends from K1 = L's source into K1';
/// e2 extends from K2' into K2 = L's target and A2 must lie in K2'.
CGoodMap restrict_extend(const CGoodMap& L, const Extender& e1, const Extender& e2);

/// Default disjoint subintervals I_q = [2q/(2m+2), (2q+1)/(2m+2)] of [0,1].
std::vector<Interval> default_subintervals(int m);

struct KolmogorovOptions {
  std::size_t refinement = 1;  // source grid points per univariate grid step
  StopRule stop{6, 0.0, 0.0};
  double slack = 0.1;
  std::vector<Interval> subintervals;  // empty: default_subintervals
};

/// L(g) = 1/(m+1) sum_q (g|I_q) o h_q o phi_q from C(I) onto C(I^n), with h_q
/// the increasing affine map [0,1] -> I_q. lift(f) glues g_q o h_q^-1 from
/// decompose((m+1)f) on the I_q and interpolates linearly between them.
CGoodMap kolmogorov_map(const InnerPtr& inner, const KolmogorovOptions& options = {});

struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::string map_id;
  Rational constant;
  std::vector<Check> checks;
  bool pass = false;

  const Check* find(std::string_view name) const;
};

struct VerifyConfig {
  double slack = 0.1;
  double roundtrip_tol = 0.05;
  double norm_tol = 1e-9;
  double linearity_tol = 1e-8;
  double vanish_tol = 1e-9;
  std::size_t random_count = 100;
  std::uint64_t seed = 0;

  /// Scales the grid allowances with `slack`: roundtrip_tol = slack/2.
  static VerifyConfig with_slack(double slack);
};

/// Runs the five c-good checks: linearity, norm <= 1 and vanishing
/// preservation on seeded random source functions; round trip and small
/// kernel on `corpus` (functions on the target vanishing on A2).
VerifyReport verify_cgood(const CGoodMap& L, const std::vector<SampledFn>& corpus, const VerifyConfig& config = {});

nlohmann::json to_json(const VerifyReport& report);

}  // namespace ldom
