#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ldom/cgood.hpp"
#include "ldom/plan.hpp"

namespace ldom {

/// Symbolic compact metrizable space: Empty, a finite-dimensional FD(d)
/// (canonically I^d), FD(*) (the block kind I^1, I^2, I^3, ... of unbounded
/// dimension; only meaningful inside Omega), or Omega(blocks, remainder): a
/// compactification of a countable sum in which every block kind occurs
/// infinitely often and the added points form `remainder`.
class SpaceDescriptor {
 public:
  enum class Kind { Empty, FD, FDAll, Omega };

  static SpaceDescriptor empty();
  static SpaceDescriptor fd(int dim);
  static SpaceDescriptor fd_all();
  /// Throws StructuralError on an empty block list or Empty blocks.
  static SpaceDescriptor omega(std::vector<SpaceDescriptor> blocks, SpaceDescriptor remainder);

  Kind kind() const noexcept;
  int dim() const;  // FD only
  const std::vector<SpaceDescriptor>& blocks() const;  // Omega only
  const SpaceDescriptor& remainder() const;           // Omega only

  bool is_empty() const noexcept { return kind() == Kind::Empty; }

  friend bool operator==(const SpaceDescriptor& x, const SpaceDescriptor& y);

 private:
  struct Node;
  explicit SpaceDescriptor(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Canonical text form, parseable by parse_descriptor.
std::string to_string(const SpaceDescriptor& d);

/// Grammar (whitespace-insensitive):
///   d := Empty | FD(n) | FD(*) | F(k) | Fk | Omega([d, d, ...], d)
/// Throws ParseError with the offending character position.
SpaceDescriptor parse_descriptor(std::string_view text);

/// K -> K minus the union of its open finite-dimensional subsets.
SpaceDescriptor derive(const SpaceDescriptor& d);

struct HeightResult {
  bool finite = true;
  int value = 0;  // height when finite, depth limit otherwise

  std::string to_string() const;
  friend bool operator==(const HeightResult&, const HeightResult&) = default;
};

HeightResult fd_height(const SpaceDescriptor& d, int depth_limit = 64);

/// F_1 = FD(1), F_2 = Omega([FD(*)], FD(0)), F_{k+1} = Omega([F_2], F_k).
SpaceDescriptor build_F(int k);

/// Descriptor of block n (1-based) of an Omega: block kinds repeat
/// cyclically and FD(*) contributes FD(n).
SpaceDescriptor omega_block(const SpaceDescriptor& omega, std::size_t n);

struct PlanOptions {
  std::size_t blocks = 3;  // per-block children recorded under BlockGlue
};

/// Operator-construction plan for a C(I) -> C(K) map with constant
/// 8^height. Throws UnsupportedInput for Empty or when the height exceeds
/// 64.
PlanPtr plan(const SpaceDescriptor& d, const PlanOptions& options = {});

/// Gluing data on a truncated block sum with clopen blocks.
struct GlueData {
  DomainPtr space;                   // TruncatedBlockSum with infinity site
  DomainPtr source;                  // [0,1] grid containing every I_n as a sub-grid
  std::vector<SampledFn> partition;  // p_n, indicator of block n
  std::vector<DomainPtr> intervals;  // I_n = [(3/2)2^-n, 2^(1-n)] grids
  std::vector<CGoodMap> block_maps;  // l_n': C(I_n) -> C(block n)
  double tail_bound = 0.5;
  Rational constant{1};              // max of the block constants
};

/// `block_maps[n]` maps C(J) onto C(block n+1) for an interval or 1-cube J
/// and is reparametrized onto I_{n+1}. `source_intervals` = 0 picks the
/// smallest [0,1] grid on which every I_n carries a multiple of its map's
/// grid. Throws StructuralError when a block map is missing or targets the
/// wrong block.
GlueData make_glue(DomainPtr space, std::vector<CGoodMap> block_maps, double tail_bound = 0.5,
                   std::size_t source_intervals = 0);

/// L0'(g) = sum_n l_n(g|I_n) p_n; g must vanish at 0 (ContractViolation).
SampledFn glue_apply(const GlueData& gd, const SampledFn& g);

/// Per-block lifts joined by linear interpolation with g(0) = 0. f must
/// vanish at infinity and its last block norm must not exceed tail_bound
/// (ContractViolation).
SampledFn glue_lift(const GlueData& gd, const SampledFn& f);

/// glue_apply/glue_lift as a c-good map (I,{0}) -> (space,{inf}).
CGoodMap glue_map(const GlueData& gd, Rational recorded);

struct RealizeOptions {
  /// Grid resolution per axis for a block/cube of the given dimension.
  std::function<std::size_t(int)> cube_res = [](int dim) -> std::size_t {
    return dim <= 1 ? 33 : dim == 2 ? 17 : dim == 3 ? 5 : 3;
  };
  StopRule stop{12, 0.0, 1e-4};
  double slack = 0.1;
  double tail_bound = 0.5;
};

/// Grid domain realizing a descriptor: FD(d) -> Cube(d), and
/// Omega(finite-dimensional blocks, FD(0)) -> the first `blocks` blocks
/// plus the infinity site. Throws UnsupportedInput otherwise.
DomainPtr realize_space(const SpaceDescriptor& d, std::size_t blocks, const RealizeOptions& options = {});

/// Executable map C(I) -> C(K) for a plan produced by plan(); its stored
/// constant equals the plan's root constant. Throws UnsupportedInput when a
/// leaf space has no grid realization.
CGoodMap realize(const PlanPtr& p, const RealizeOptions& options = {});

}  // namespace ldom
