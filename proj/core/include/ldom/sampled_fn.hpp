#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ldom/domain.hpp"

namespace ldom {

/// A continuous function represented by its values at the grid sites of a
/// compact domain. Values between sites are piecewise-multilinear.
class SampledFn {
 public:
  SampledFn(DomainPtr domain, std::vector<double> values);

  static SampledFn zeros(DomainPtr domain);
  static SampledFn constant(DomainPtr domain, double value);
  static SampledFn sample(DomainPtr domain, const std::function<double(std::span<const double>)>& fn);

  const DomainPtr& domain_ptr() const noexcept { return domain_; }
  const CompactDomain& domain() const noexcept { return *domain_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double> take_values() && { return std::move(values_); }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

/// The closed set A of C(K;A), as a set of grid sites of K.
struct VanishingSet {
  DomainPtr domain;
  std::vector<std::size_t> sites;

  VanishingSet(DomainPtr d, std::vector<std::size_t> s);
};

double sup_norm(const SampledFn& f);

double eval(const SampledFn& f, std::span<const double> point);
inline double eval(const SampledFn& f, std::initializer_list<double> point) {
  return eval(f, std::span<const double>(point.begin(), point.size()));
}

SampledFn lin_comb(double alpha, const SampledFn& f, double beta, const SampledFn& g);
SampledFn scale(double alpha, const SampledFn& f);

/// Values of f at the sites of `sub`, whose coordinates are read in f's chart.
SampledFn restrict(const SampledFn& f, const DomainPtr& sub);

bool vanishes_on(const SampledFn& f, const VanishingSet& a, double tol);

/// Glues functions on disjoint closed subintervals into one function on
/// `parent`: equal to each piece on its subinterval, equal to the anchor
/// values at the anchor points, and linear on each gap (constant beyond the
/// outermost known point).
SampledFn assemble_piecewise(std::span<const SampledFn> pieces, const Interval& parent,
                             std::span<const std::pair<double, double>> anchors = {});

/// Same gluing for a function given on a SubIntervalList domain, onto the
/// list's own parent interval.
SampledFn assemble_piecewise(const SampledFn& on_pieces);

/// Values of a block-sum function on block n (0-based) as a function on
/// that block's cube.
SampledFn block_values(const SampledFn& f, std::size_t n);

}  // namespace ldom
