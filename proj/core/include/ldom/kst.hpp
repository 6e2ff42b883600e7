#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldom/rational.hpp"
#include "ldom/sampled_fn.hpp"

namespace ldom {

/// Parameters of the iterative superposition algorithm.
///
/// `gamma` and `digit_depth` are 0 until bound to a cube grid by
/// InnerFamily::build, which fills in the defaults.
struct KstParams {
  int n = 1;
  Rational c{2};
  Rational eta{1, 2};
  int m = 0;
  Rational eps{1};
  int gamma = 0;
  int digit_depth = 0;

  /// (m-n-1)/(m+1) * eps + 2n/(m+1); equals (2n+1)/(m+1) exactly.
  Rational budget() const;
  /// (2n+1)/(m+1); never exceeds eta.
  Rational bound() const;
};

/// eta = 1 - 1/c and the smallest m with (2n+1)/(m+1) <= eta and
/// m >= max(2n, n+2); eps = 1/(m-n-1). Throws ParameterError unless c > 1, n >= 1.
KstParams make_params(int n, const Rational& c);

struct InnerOptions {
  std::size_t cube_res = 65;
  int gamma = 0;        // 0: smallest admissible base >= m+2 (see InnerFamily::build)
  int digit_depth = 0;  // 0: smallest depth with gamma^-depth < half the grid spacing
};

/// Inner functions phi_0..phi_m on a cube grid.
///
/// phi_q(x) = sum_p lambda_p * psi(x_p + q*a) / (M-1), where psi is a
/// non-decreasing gamma-adic staircase truncated at `digit_depth`: constant on
/// the leading (gamma-2)/(gamma-1) of every cell of width gamma^-depth and
/// rising linearly by one step on the remaining gap. The shifts q*a place the
/// gaps of different q at disjoint positions, so every coordinate of a point
/// lies in a gap for at most one q. lambda_p = C^(p-1) with C cells per axis
/// keeps the images of distinct cubes distinct.
class InnerFamily {
 public:
  static std::shared_ptr<const InnerFamily> build(const KstParams& params, const InnerOptions& options = {});

  const KstParams& params() const noexcept { return params_; }
  const DomainPtr& cube() const noexcept { return cube_; }
  /// Uniform grid on [0,1] the outer functions g_q live on.
  const DomainPtr& univariate() const noexcept { return univariate_; }

  std::size_t cells_per_axis() const noexcept { return cells_; }
  std::size_t code_count() const noexcept { return codes_; }
  double cell_width() const noexcept { return cell_width_; }
  double plateau_fraction() const noexcept { return rho_; }
  double shift(int q) const noexcept;

  /// The univariate building block, in cell units: non-decreasing, continuous,
  /// equal to j on the plateau of cell j.
  double psi(double t) const noexcept;

  const SampledFn& phi(int q) const { return phi_.at(static_cast<std::size_t>(q)); }

  /// Code of the cube containing `site` for family q, or nothing when the site
  /// lies in a gap of family q.
  std::optional<std::size_t> plateau_code(int q, std::size_t site) const;

  /// Number of families q for which `site` lies in a gap (at most n).
  int gap_count(std::size_t site) const;

  /// Largest |phi_q(x) - phi_q(y)| over grid-adjacent sites and all q.
  double modulus() const noexcept { return modulus_; }

  /// Centre of the cube with the given code for family q, clamped to [0,1]^n.
  std::vector<double> cube_centre(int q, std::size_t code) const;

 private:
  InnerFamily() = default;

  KstParams params_;
  DomainPtr cube_;
  DomainPtr univariate_;
  std::size_t cells_ = 0;
  std::size_t codes_ = 0;
  double cell_width_ = 0.0;
  double rho_ = 0.0;
  double modulus_ = 0.0;
  std::vector<SampledFn> phi_;
  std::vector<std::vector<std::int64_t>> site_code_;  // per q, -1 for gap sites
};

using InnerPtr = std::shared_ptr<const InnerFamily>;

/// Composition g o phi sampled on phi's grid.
SampledFn compose_outer(const SampledFn& g, const SampledFn& phi);

struct StepResult {
  std::vector<SampledFn> g;      // g_q^k on the univariate grid
  SampledFn f_next;              // f_k
  double decay_ratio = 0.0;      // ||f_k|| / ||f_{k-1}||
  std::vector<double> g_ratios;  // ||g_q^k|| / (||f_{k-1}|| / (m+1))
};

/// One outer-function step: g_q^k takes the value f_{k-1}(cube)/(m+1) on the
/// image of every cube of family q, and f_k = f_{k-1} - sum_q g_q^k o phi_q.
/// Throws ContractViolation when ||g_q^k|| > (1+slack)||f_{k-1}||/(m+1) or
/// ||f_k|| > (eta+slack)||f_{k-1}||.
StepResult decompose_step(const SampledFn& f_prev, const InnerFamily& inner, double slack = 0.1);

struct StopRule {
  std::size_t max_iters = 6;
  double target_residual = 0.0;   // absolute
  double relative_residual = 0.0; // relative to ||f_0||
};

struct Decomposition {
  KstParams params;
  std::vector<SampledFn> g;                  // accumulated g_q
  std::vector<double> residual_norms;        // ||f_0||, ..., ||f_K||
  std::vector<std::vector<double>> step_g_norms;  // [k-1][q] = ||g_q^k||
  std::size_t iterations = 0;
  std::optional<SampledFn> final_residual;   // f_K
};

/// Iterates decompose_step until a stop condition holds. Also enforces the
/// norm ledger max_q ||g_q|| <= c(1+slack)||f||.
Decomposition decompose(const SampledFn& f, const InnerFamily& inner, const StopRule& stop, double slack = 0.1);

/// sum_q g_q o phi_q on the cube grid.
SampledFn reconstruct(const Decomposition& dec, const InnerFamily& inner);

nlohmann::json to_json(const KstParams& p);
nlohmann::json to_json(const Decomposition& dec);

}  // namespace ldom
