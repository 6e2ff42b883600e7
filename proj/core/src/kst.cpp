#include "ldom/kst.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "ldom/errors.hpp"

namespace ldom {

namespace {

constexpr std::size_t kMaxCodes = std::size_t{1} << 22;
constexpr double kEdge = 1e-9;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Smallest depth with gamma^-depth < half_spacing.
int separating_depth(int gamma, double half_spacing) {
  int d = 1;
  double h = 1.0 / gamma;
  while (!(h < half_spacing)) {
    h /= gamma;
    ++d;
  }
  return d;
}

/// Replaces every unknown entry by linear interpolation between the nearest
/// known entries (constant beyond the outermost ones).
void fill_linear(std::vector<double>& v, const std::vector<char>& known) {
  std::size_t prev = v.size();
  for (std::size_t i = 0; i <= v.size(); ++i) {
    if (i < v.size() && !known[i]) continue;
    const std::size_t begin = prev == v.size() ? 0 : prev + 1;
    for (std::size_t j = begin; j < i; ++j) {
      if (prev == v.size()) {
        v[j] = i < v.size() ? v[i] : 0.0;
      } else if (i == v.size()) {
        v[j] = v[prev];
      } else {
        const double t = static_cast<double>(j - prev) / static_cast<double>(i - prev);
        v[j] = (1.0 - t) * v[prev] + t * v[i];
      }
    }
    prev = i;
  }
}

std::string ratio_text(double measured, double bound) {
  std::ostringstream os;
  os.precision(6);
  os << measured << " > " << bound;
  return os.str();
}

}  // namespace

Rational KstParams::budget() const {
  return Rational(m - n - 1, m + 1) * eps + Rational(2 * n, m + 1);
}

Rational KstParams::bound() const { return Rational(2 * n + 1, m + 1); }

KstParams make_params(int n, const Rational& c) {
  if (n < 1) throw ParameterError("dimension n must be >= 1");
  if (!(c > Rational(1))) throw ParameterError("constant c must exceed 1, got " + c.to_string());
  KstParams p;
  p.n = n;
  p.c = c;
  p.eta = Rational(1) - Rational(1) / c;
  int m = std::max(2 * n, n + 2);
  while (Rational(2 * n + 1, m + 1) > p.eta) {
    ++m;
    if (m > 1'000'000) throw ParameterError("c too close to 1: m would exceed 10^6");
  }
  p.m = m;
  p.eps = Rational(1, m - n - 1);
  return p;
}

std::shared_ptr<const InnerFamily> InnerFamily::build(const KstParams& params, const InnerOptions& options) {
  if (params.m < std::max(2 * params.n, params.n + 2)) throw ParameterError("inner family: m too small for n");
  if (options.cube_res < 2) throw ParameterError("inner family: cube resolution must be >= 2");

  const double spacing = 1.0 / static_cast<double>(options.cube_res - 1);
  const double half = spacing / 2.0;

  int gamma = options.gamma;
  if (gamma == 0) {
    // Smallest admissible base whose separating depth does not produce far
    // more cells than grid sites.
    for (gamma = params.m + 2;; ++gamma) {
      const int d = options.digit_depth > 0 ? options.digit_depth : separating_depth(gamma, half);
      const double cells = std::pow(static_cast<double>(gamma), d);
      if (d == 1 || cells <= 4.0 / spacing) break;
    }
  } else if (gamma < params.m + 2) {
    throw ParameterError("inner family: base gamma must be >= m+2 = " + std::to_string(params.m + 2));
  }

  int depth = options.digit_depth;
  if (depth == 0) {
    depth = separating_depth(gamma, half);
  } else if (!(std::pow(static_cast<double>(gamma), -depth) < half)) {
    throw ResolutionError("digit depth " + std::to_string(depth) + " does not separate grid sites (gamma^-depth >= " +
                          std::to_string(half) + ")");
  }

  auto fam = std::shared_ptr<InnerFamily>(new InnerFamily());
  fam->params_ = params;
  fam->params_.gamma = gamma;
  fam->params_.digit_depth = depth;
  fam->cube_ = CompactDomain::cube(static_cast<std::size_t>(params.n), options.cube_res);

  const double cells_d = std::pow(static_cast<double>(gamma), depth) + 2.0;
  const double codes_d = std::pow(cells_d, params.n);
  if (codes_d > static_cast<double>(kMaxCodes)) {
    throw ResolutionError("inner family: " + std::to_string(static_cast<long long>(codes_d)) +
                          " cube images exceed the univariate grid budget");
  }
  fam->cells_ = static_cast<std::size_t>(cells_d);
  fam->codes_ = ipow(fam->cells_, params.n);
  fam->cell_width_ = std::pow(static_cast<double>(gamma), -depth);
  fam->rho_ = static_cast<double>(gamma - 2) / static_cast<double>(gamma - 1);
  const std::size_t intervals = std::bit_ceil(std::max<std::size_t>(fam->codes_ - 1, 1));
  fam->univariate_ = CompactDomain::interval(0.0, 1.0, intervals + 1);

  const Cube& cube = *fam->cube_->as<Cube>();
  const std::size_t sites = fam->cube_->site_count();
  const std::size_t n = cube.dim;
  const double denom = static_cast<double>(intervals);

  fam->phi_.reserve(static_cast<std::size_t>(params.m + 1));
  fam->site_code_.assign(static_cast<std::size_t>(params.m + 1), std::vector<std::int64_t>(sites, -1));
  for (int q = 0; q <= params.m; ++q) {
    std::vector<double> values(sites);
    const double sh = fam->shift(q);
    for (std::size_t s = 0; s < sites; ++s) {
      const auto idx = cube_index(cube, s);
      double xi = 0.0;
      std::size_t code = 0;
      std::size_t weight = 1;
      bool plateau = true;
      for (std::size_t p = 0; p < n; ++p) {
        const double x = static_cast<double>(idx[p]) / static_cast<double>(cube.res - 1);
        const double u = (x + sh) / fam->cell_width_;
        auto j = static_cast<std::size_t>(std::floor(u));
        double frac = u - static_cast<double>(j);
        if (frac > 1.0 - kEdge) {
          ++j;
          frac = 0.0;
        }
        double level = static_cast<double>(j);
        if (frac > fam->rho_ + kEdge) {
          plateau = false;
          level += (frac - fam->rho_) / (1.0 - fam->rho_);
        }
        xi += static_cast<double>(weight) * level;
        code += weight * j;
        weight *= fam->cells_;
      }
      values[s] = xi / denom;
      if (plateau) {
        fam->site_code_[q][s] = static_cast<std::int64_t>(code);
        values[s] = static_cast<double>(code) / denom;
      }
    }
    fam->phi_.emplace_back(fam->cube_, std::move(values));
  }

  double modulus = 0.0;
  for (const auto& phi : fam->phi_) {
    std::size_t stride = 1;
    for (std::size_t p = n; p-- > 0;) {
      for (std::size_t s = 0; s < sites; ++s) {
        if ((s / stride) % cube.res + 1 < cube.res) modulus = std::max(modulus, std::abs(phi[s + stride] - phi[s]));
      }
      stride *= cube.res;
    }
  }
  fam->modulus_ = modulus;
  return fam;
}

double InnerFamily::shift(int q) const noexcept {
  return static_cast<double>(q) * cell_width_ / static_cast<double>(params_.gamma - 1);
}

double InnerFamily::psi(double t) const noexcept {
  const double u = t / cell_width_;
  double j = std::floor(u);
  double frac = u - j;
  if (frac > 1.0 - kEdge) {
    j += 1.0;
    frac = 0.0;
  }
  if (frac <= rho_ + kEdge) return j;
  return j + (frac - rho_) / (1.0 - rho_);
}

std::optional<std::size_t> InnerFamily::plateau_code(int q, std::size_t site) const {
  const auto code = site_code_.at(static_cast<std::size_t>(q)).at(site);
  if (code < 0) return std::nullopt;
  return static_cast<std::size_t>(code);
}

int InnerFamily::gap_count(std::size_t site) const {
  int bad = 0;
  for (const auto& codes : site_code_) bad += codes.at(site) < 0 ? 1 : 0;
  return bad;
}

std::vector<double> InnerFamily::cube_centre(int q, std::size_t code) const {
  std::vector<double> x(static_cast<std::size_t>(params_.n));
  for (auto& xp : x) {
    const std::size_t j = code % cells_;
    code /= cells_;
    xp = std::clamp((static_cast<double>(j) + rho_ / 2.0) * cell_width_ - shift(q), 0.0, 1.0);
  }
  return x;
}

SampledFn compose_outer(const SampledFn& g, const SampledFn& phi) {
  std::vector<double> out(phi.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = eval(g, {phi[s]});
  return SampledFn(phi.domain_ptr(), std::move(out));
}

StepResult decompose_step(const SampledFn& f_prev, const InnerFamily& inner, double slack) {
  if (!same_domain(f_prev.domain_ptr(), inner.cube())) {
    throw StructuralError("decompose_step: function is not on the inner family's cube grid");
  }
  const KstParams& p = inner.params();
  const double scale = 1.0 / static_cast<double>(p.m + 1);
  const std::size_t nodes = inner.univariate()->site_count();
  const std::size_t codes = inner.code_count();
  const double fnorm = sup_norm(f_prev);

  StepResult r{{}, SampledFn::zeros(inner.cube()), 0.0, {}};
  std::vector<double> next(f_prev.values().begin(), f_prev.values().end());
  std::vector<char> known(nodes);
  for (int q = 0; q <= p.m; ++q) {
    std::vector<double> vals(nodes, 0.0);
    std::fill(known.begin(), known.end(), 0);
    for (std::size_t s = 0; s < f_prev.size(); ++s) {
      if (const auto code = inner.plateau_code(q, s)) {
        vals[*code] = f_prev[s] * scale;
        known[*code] = 1;
      }
    }
    // Gap sites read g between two nodes; empty cubes there take f_prev at
    // their centre. All other nodes are never sampled by phi_q and are filled
    // by linear interpolation.
    const auto& phi = inner.phi(q);
    const double top = static_cast<double>(nodes - 1);
    for (std::size_t s = 0; s < f_prev.size(); ++s) {
      if (inner.plateau_code(q, s)) continue;
      const auto lo = static_cast<std::size_t>(std::floor(phi[s] * top));
      for (std::size_t node : {lo, std::min(lo + 1, nodes - 1)}) {
        if (known[node] || node >= codes) continue;
        vals[node] = fnorm > 0.0 ? eval(f_prev, inner.cube_centre(q, node)) * scale : 0.0;
        known[node] = 1;
      }
    }
    fill_linear(vals, known);

    SampledFn g(inner.univariate(), std::move(vals));
    for (std::size_t s = 0; s < next.size(); ++s) next[s] -= eval(g, {phi[s]});
    r.g.push_back(std::move(g));
  }
  r.f_next = SampledFn(inner.cube(), std::move(next));

  if (fnorm > 1e-300) {
    const double unit = fnorm * scale;
    for (const auto& g : r.g) r.g_ratios.push_back(sup_norm(g) / unit);
    r.decay_ratio = sup_norm(r.f_next) / fnorm;
    for (std::size_t q = 0; q < r.g_ratios.size(); ++q) {
      if (r.g_ratios[q] > 1.0 + slack) {
        throw ContractViolation("outer step: ||g_" + std::to_string(q) + "|| ratio " +
                                ratio_text(r.g_ratios[q], 1.0 + slack));
      }
    }
    const double bound = p.eta.to_double() + slack;
    if (r.decay_ratio > bound) throw ContractViolation("outer step: decay ratio " + ratio_text(r.decay_ratio, bound));
  } else {
    r.g_ratios.assign(r.g.size(), 0.0);
  }
  return r;
}

Decomposition decompose(const SampledFn& f, const InnerFamily& inner, const StopRule& stop, double slack) {
  const KstParams& p = inner.params();
  Decomposition dec;
  dec.params = p;
  for (int q = 0; q <= p.m; ++q) dec.g.push_back(SampledFn::zeros(inner.univariate()));
  SampledFn residual = f;
  const double f0 = sup_norm(f);
  dec.residual_norms.push_back(f0);

  auto done = [&](double norm) {
    return norm <= stop.target_residual || norm <= stop.relative_residual * f0 || norm == 0.0;
  };
  while (dec.iterations < stop.max_iters && !done(dec.residual_norms.back())) {
    StepResult step = decompose_step(residual, inner, slack);
    std::vector<double> norms;
    for (std::size_t q = 0; q < step.g.size(); ++q) {
      norms.push_back(sup_norm(step.g[q]));
      dec.g[q] = lin_comb(1.0, dec.g[q], 1.0, step.g[q]);
    }
    dec.step_g_norms.push_back(std::move(norms));
    residual = std::move(step.f_next);
    dec.residual_norms.push_back(sup_norm(residual));
    ++dec.iterations;
  }

  double g_max = 0.0;
  for (const auto& g : dec.g) g_max = std::max(g_max, sup_norm(g));
  const double ledger = p.c.to_double() * (1.0 + slack) * f0;
  if (g_max > ledger + 1e-12) {
    throw ContractViolation("decomposition: max ||g_q|| " + ratio_text(g_max, ledger));
  }
  dec.final_residual = std::move(residual);
  return dec;
}

SampledFn reconstruct(const Decomposition& dec, const InnerFamily& inner) {
  if (dec.g.size() != static_cast<std::size_t>(inner.params().m + 1)) {
    throw StructuralError("reconstruct: decomposition does not match the inner family");
  }
  std::vector<double> out(inner.cube()->site_count(), 0.0);
  for (std::size_t q = 0; q < dec.g.size(); ++q) {
    if (!same_domain(dec.g[q].domain_ptr(), inner.univariate())) {
      throw StructuralError("reconstruct: outer function grid mismatch");
    }
    const auto& phi = inner.phi(static_cast<int>(q));
    for (std::size_t s = 0; s < out.size(); ++s) out[s] += eval(dec.g[q], {phi[s]});
  }
  return SampledFn(inner.cube(), std::move(out));
}

nlohmann::json to_json(const KstParams& p) {
  return {{"n", p.n},
          {"c", p.c.to_string()},
          {"eta", p.eta.to_string()},
          {"m", p.m},
          {"eps", p.eps.to_string()},
          {"gamma", p.gamma},
          {"digit_depth", p.digit_depth}};
}

nlohmann::json to_json(const Decomposition& dec) {
  nlohmann::json g = nlohmann::json::array();
  for (const auto& gq : dec.g) g.push_back(std::vector<double>(gq.values().begin(), gq.values().end()));
  return {{"params", to_json(dec.params)},
          {"iterations", dec.iterations},
          {"residual_norms", dec.residual_norms},
          {"g_q", std::move(g)}};
}

}  // namespace ldom
