#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ldom {

/// Uniform grid of `res` sites on [a, b].
struct Interval {
  double a = 0.0;
  double b = 1.0;
  std::size_t res = 2;

  double spacing() const noexcept { return (b - a) / static_cast<double>(res - 1); }
  double site(std::size_t i) const noexcept {
    return i + 1 == res ? b : a + static_cast<double>(i) * spacing();
  }
  bool contains(double x, double tol = 1e-12) const noexcept { return x >= a - tol && x <= b + tol; }
};

/// Uniform grid on [0,1]^dim with `res` sites per axis. dim == 0 is a point.
/// Sites are ordered lexicographically: the first coordinate varies slowest.
struct Cube {
  std::size_t dim = 1;
  std::size_t res = 2;
};

/// Disjoint closed pieces of a parent interval, each with its own grid, plus
/// optional isolated anchor points (e.g. the accumulation point 0 of the
/// intervals [(3/2)2^-n, 2^(1-n)]). Sites: pieces in order, then anchors.
struct SubIntervalList {
  Interval parent;
  std::vector<Interval> pieces;
  std::vector<double> anchors;
};

/// Finite realization of a one-point compactification of a sum of cubes:
/// blocks 1..N followed, when present, by a single infinity site.
struct TruncatedBlockSum {
  std::vector<Cube> blocks;
  bool has_infinity = true;
};

class CompactDomain;
using DomainPtr = std::shared_ptr<const CompactDomain>;

/// A finite closed subset of another domain, given by parent site indices.
struct SiteSubset {
  DomainPtr parent;
  std::vector<std::size_t> sites;
};

/// A compact domain together with the grid its functions are sampled on.
///
/// Immutable after construction; construction validates every invariant and
/// throws StructuralError/ParameterError on violation.
class CompactDomain {
 public:
  using Variant = std::variant<Interval, Cube, SubIntervalList, TruncatedBlockSum, SiteSubset>;

  explicit CompactDomain(Variant v);

  static DomainPtr interval(double a, double b, std::size_t res);
  static DomainPtr cube(std::size_t dim, std::size_t res);
  static DomainPtr point() { return cube(0, 1); }
  static DomainPtr sub_intervals(Interval parent, std::vector<Interval> pieces, std::vector<double> anchors = {});
  static DomainPtr block_sum(std::vector<Cube> blocks, bool has_infinity = true);
  static DomainPtr subset(DomainPtr parent, std::vector<std::size_t> sites);

  const Variant& variant() const noexcept { return v_; }
  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&v_);
  }

  std::size_t site_count() const noexcept { return site_count_; }

  /// Number of coordinate columns used by the CSV grid format and by eval.
  std::size_t coord_count() const;

  /// Coordinates of a site in the domain's own chart. Block sums use
  /// (block number, local coordinates padded with 0); the infinity site is
  /// all +inf.
  std::vector<double> coords(std::size_t site) const;

  /// Position of a site in a Euclidean embedding used for distances. Block n
  /// of a block sum is placed at distance ~2^-n from the infinity site.
  std::vector<double> ambient(std::size_t site) const;

  /// Site whose coordinates match `x` within `tol`, if any.
  std::optional<std::size_t> locate(std::span<const double> x, double tol = 1e-9) const;

  bool is_infinity(std::size_t site) const noexcept;
  std::optional<std::size_t> infinity_site() const noexcept;

  /// For block sums: first site of block `n` (0-based) and its site count.
  std::size_t block_offset(std::size_t n) const;
  std::size_t block_size(std::size_t n) const;

  std::string describe() const;

  friend bool operator==(const CompactDomain& a, const CompactDomain& b);

 private:
  Variant v_;
  std::size_t site_count_ = 0;
};

bool same_domain(const DomainPtr& a, const DomainPtr& b);

std::size_t cube_site_count(const Cube& c);

/// Multi-index of a cube site (first coordinate slowest).
std::vector<std::size_t> cube_index(const Cube& c, std::size_t site);

}  // namespace ldom
