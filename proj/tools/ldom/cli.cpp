#include "ldom/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "ldom/chain.hpp"
#include "ldom/corpus.hpp"
#include "ldom/errors.hpp"
#include "ldom/fd.hpp"
#include "ldom/grid_io.hpp"
#include "ldom/kst.hpp"

namespace ldom::cli {

namespace {

struct DecomposeArgs {
  int n = 2;
  std::string c = "2";
  std::string fn;
  std::string input;
  std::size_t iters = 6;
  std::size_t res = 65;
  double slack = 0.1;
  double target_residual = 0.0;
  int gamma = 0;
  int digit_depth = 0;
  std::string out_dir = ".";
};

struct VerifyArgs {
  std::string what;
  int n = 2;
  std::string c = "2";
  std::string space = "F(2)";
  std::size_t blocks = 3;
  std::size_t res = 65;
  std::size_t levels = 3;
  std::size_t per_unit = 16;
  double slack = 0.1;
  std::optional<double> roundtrip_tol;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct HeightArgs {
  std::string expr;
  int depth_limit = 64;
};

struct PlanArgs {
  std::string expr;
  std::size_t blocks = 3;
  bool json = false;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw UnsupportedInput("cannot write " + path.string());
  os << text;
}

int cmd_decompose(const DecomposeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.fn.empty() == a.input.empty()) {
    err << "decompose: give exactly one of --fn and --input\n";
    return kUsage;
  }
  int n = a.n;
  std::size_t res = a.res;
  std::optional<SampledFn> loaded;
  if (!a.input.empty()) {
    std::ifstream is(a.input);
    if (!is) {
      err << "decompose: cannot read " << a.input << "\n";
      return kUsage;
    }
    loaded = read_grid_csv(is);
    const auto* cube = loaded->domain().as<Cube>();
    if (!cube) {
      err << "decompose: input must be a grid on the unit cube [0,1]^n with n >= 2\n";
      return kUsage;
    }
    n = static_cast<int>(cube->dim);
    res = cube->res;
  }

  const KstParams params = make_params(n, Rational::parse(a.c));
  const InnerPtr inner = InnerFamily::build(params, {res, a.gamma, a.digit_depth});
  const SampledFn f = loaded ? SampledFn(inner->cube(), std::move(*loaded).take_values())
                             : SampledFn::sample(inner->cube(), named_function(a.fn));
  const Decomposition dec = decompose(f, *inner, {a.iters, a.target_residual, 0.0}, a.slack);
  const double error = sup_norm(lin_comb(1.0, reconstruct(dec, *inner), -1.0, f));

  std::filesystem::create_directories(a.out_dir);
  nlohmann::json doc = to_json(dec);
  doc["function"] = a.fn.empty() ? a.input : a.fn;
  doc["cube_res"] = res;
  doc["slack"] = a.slack;
  doc["reconstruction_error"] = error;
  write_file(std::filesystem::path(a.out_dir) / "decomposition.json", doc.dump(2) + "\n");

  std::ostringstream csv;
  csv.precision(17);
  csv << "step,residual_norm,ratio\n";
  for (std::size_t k = 0; k < dec.residual_norms.size(); ++k) {
    csv << k << ',' << dec.residual_norms[k] << ',';
    if (k > 0 && dec.residual_norms[k - 1] > 0.0) csv << dec.residual_norms[k] / dec.residual_norms[k - 1];
    csv << '\n';
  }
  write_file(std::filesystem::path(a.out_dir) / "residuals.csv", csv.str());

  const auto& p = inner->params();
  out << "n=" << p.n << " c=" << p.c << " eta=" << p.eta << " m=" << p.m << " eps=" << p.eps << " gamma=" << p.gamma
      << " depth=" << p.digit_depth << "\n";
  out << "iterations=" << dec.iterations << " ||f||=" << dec.residual_norms.front()
      << " residual=" << dec.residual_norms.back() << " reconstruction_error=" << error << "\n";
  return kOk;
}

std::vector<SampledFn> corpus_for(const DomainPtr& target) {
  if (target->as<TruncatedBlockSum>()) return block_corpus(target);
  if (target->site_count() == 1) return {SampledFn::constant(target, 1.0)};
  return standard_corpus(target);
}

VerifyConfig config_from(const VerifyArgs& a, std::size_t source_sites) {
  VerifyConfig cfg = VerifyConfig::with_slack(a.slack);
  if (a.roundtrip_tol) cfg.roundtrip_tol = *a.roundtrip_tol;
  cfg.seed = a.seed;
  cfg.random_count = a.count > 0 ? a.count : source_sites > 1'000'000 ? 20 : 100;
  return cfg;
}

PlanPtr find_glue(const PlanPtr& node) {
  if (node->kind == PlanKind::BlockGlue) return node;
  for (const auto& c : node->children) {
    if (auto g = find_glue(c)) return g;
  }
  return nullptr;
}

VerifyReport verify_chain(const VerifyArgs& a) {
  const KwSequence seq = make_interval_sequence(a.levels, a.per_unit);
  const ChainOperator chain = build_chain(seq, default_chain_maps(seq));
  const VerifyConfig cfg = config_from(a, seq.host()->site_count());

  const std::vector<std::function<double(double)>> globals{
      [](double x) { return std::sin(x); }, [](double x) { return x * x; }, [](double) { return 1.0; }};
  double coherence = 0.0;
  double roundtrip = 0.0;
  for (const auto& g : globals) {
    const ChainElement t = restrict_family(seq, g);
    coherence = std::max(coherence, coherence_defect(t, seq));
    const ChainElement back = chain.apply(chain.lift(t));
    const double scale_ref = sup_norm(t.components.back());
    for (std::size_t n = 0; n < seq.size(); ++n) {
      roundtrip = std::max(roundtrip, sup_norm(lin_comb(1.0, back.components[n], -1.0, t.components[n])) / scale_ref);
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_host = [&] {
    std::vector<double> v(seq.host()->site_count());
    for (double& x : v) x = unit(rng);
    return SampledFn(seq.host(), std::move(v));
  };
  double extension = 0.0;
  double linear = 0.0;
  const std::size_t trials = std::min<std::size_t>(cfg.random_count, 10);
  for (std::size_t i = 0; i < trials; ++i) {
    const SampledFn g = random_host();
    const SampledFn h = random_host();
    const ChainElement cg = chain.apply(g);
    extension = std::max(extension, coherence_defect(cg, seq));
    const ChainElement ch = chain.apply(h);
    const ChainElement mix = chain.apply(lin_comb(0.5, g, -2.0, h));
    for (std::size_t n = 0; n < seq.size(); ++n) {
      const SampledFn expect = lin_comb(0.5, cg.components[n], -2.0, ch.components[n]);
      linear = std::max(linear, sup_norm(lin_comb(1.0, mix.components[n], -1.0, expect)) / 2.5);
    }
  }

  VerifyReport r;
  r.map_id = "chain(levels=" + std::to_string(a.levels) + ")";
  Rational c{1};
  for (const auto& L : chain.maps().level_maps) c = std::max(c, L.constant());
  r.constant = c;
  r.checks = {
      {"coherence", coherence, 1e-9, coherence <= 1e-9},
      {"round_trip", roundtrip, cfg.roundtrip_tol, roundtrip <= cfg.roundtrip_tol},
      {"extension", extension, 1e-9, extension <= 1e-9},
      {"linearity", linear, cfg.linearity_tol, linear <= cfg.linearity_tol},
  };
  r.pass = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& ch) { return ch.pass; });
  return r;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  VerifyReport report;
  if (a.what == "kolmogorov") {
    const InnerPtr inner = InnerFamily::build(make_params(a.n, Rational::parse(a.c)), {a.res});
    const CGoodMap L = kolmogorov_map(inner, {1, {6, 0.0, 0.0}, a.slack, {}});
    report = verify_cgood(L, standard_corpus(inner->cube()), config_from(a, L.source().domain->site_count()));
  } else if (a.what == "plan" || a.what == "glue" || a.what == "glue-demo") {
    PlanPtr p = plan(parse_descriptor(a.space), {a.blocks});
    if (a.what != "plan") {
      p = find_glue(p);
      if (!p) throw UnsupportedInput("verify glue: " + a.space + " has fd-height 1, there is nothing to glue");
    }
    RealizeOptions ro;
    ro.slack = a.slack;
    const CGoodMap L = realize(p, ro);
    report = verify_cgood(L, corpus_for(L.target().domain), config_from(a, L.source().domain->site_count()));
  } else if (a.what == "chain" || a.what == "chain-demo") {
    report = verify_chain(a);
  } else {
    err << "verify: unknown map '" << a.what << "' (expected kolmogorov, plan, glue-demo or chain-demo)\n";
    return kUsage;
  }

  const std::string text = to_json(report).dump(2) + "\n";
  if (!a.out.empty()) write_file(a.out, text);
  out << text;
  for (const auto& c : report.checks) {
    if (!c.pass) err << "check failed: " << c.name << " measured " << c.measured << " > bound " << c.bound << "\n";
  }
  return report.pass ? kOk : kContract;
}

int cmd_fdheight(const HeightArgs& a, std::ostream& out) {
  out << fd_height(parse_descriptor(a.expr), a.depth_limit).to_string() << "\n";
  return kOk;
}

int cmd_plan(const PlanArgs& a, std::ostream& out) {
  const PlanPtr p = plan(parse_descriptor(a.expr), {a.blocks});
  if (a.json) {
    out << to_json(*p).dump(2) << "\n";
  } else {
    out << render_tree(*p);
  }
  return kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear surjections between spaces of continuous functions", "ldom"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* decompose_cmd = app.add_subcommand("decompose", "Kolmogorov superposition of a function on [0,1]^n");
  decompose_cmd->add_option("--n", dec.n, "Dimension")->check(CLI::Range(1, 8));
  decompose_cmd->add_option("--c", dec.c, "Target constant c > 1 (integer, fraction or decimal)");
  decompose_cmd->add_option("--fn", dec.fn, "Named function")->check(CLI::IsMember(named_function_names()));
  decompose_cmd->add_option("--input", dec.input, "Grid CSV on [0,1]^n");
  decompose_cmd->add_option("--iters", dec.iters, "Maximum outer steps K");
  decompose_cmd->add_option("--res", dec.res, "Grid sites per axis")->check(CLI::Range(2, 4097));
  decompose_cmd->add_option("--slack", dec.slack, "Discretization allowance")->check(CLI::Range(0.0, 1.0));
  decompose_cmd->add_option("--target-residual", dec.target_residual, "Stop once ||f_k|| falls below this");
  decompose_cmd->add_option("--gamma", dec.gamma, "Digit base (0 = automatic)");
  decompose_cmd->add_option("--digit-depth", dec.digit_depth, "Digit depth (0 = automatic)");
  decompose_cmd->add_option("--out-dir", dec.out_dir, "Directory for decomposition.json and residuals.csv");

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "Check the c-good contract of a constructed map");
  verify_cmd->add_option("map", ver.what, "kolmogorov | plan | glue-demo | chain-demo")->required();
  verify_cmd->add_option("--n", ver.n, "Dimension (kolmogorov)")->check(CLI::Range(1, 8));
  verify_cmd->add_option("--c", ver.c, "Constant (kolmogorov)");
  verify_cmd->add_option("--res", ver.res, "Cube grid sites per axis (kolmogorov)")->check(CLI::Range(2, 4097));
  verify_cmd->add_option("--space", ver.space, "Space descriptor (plan, glue-demo)");
  verify_cmd->add_option("--blocks", ver.blocks, "Truncation N (plan, glue-demo)")->check(CLI::Range(1, 6));
  verify_cmd->add_option("--levels", ver.levels, "Chain levels (chain-demo)")->check(CLI::Range(1, 6));
  verify_cmd->add_option("--per-unit", ver.per_unit, "Chain grid sites per unit length")->check(CLI::Range(1, 256));
  verify_cmd->add_option("--slack", ver.slack, "Discretization allowance")->check(CLI::Range(0.0, 1.0));
  verify_cmd->add_option("--roundtrip-tol", ver.roundtrip_tol, "Round-trip tolerance (default slack/2)");
  verify_cmd->add_option("--count", ver.count, "Random source functions (0 = automatic)");
  verify_cmd->add_option("--seed", ver.seed, "Seed for random source functions");
  verify_cmd->add_option("--out", ver.out, "Also write the JSON report here");

  HeightArgs height;
  auto* height_cmd = app.add_subcommand("fdheight", "fd-height of a space descriptor");
  height_cmd->add_option("expr", height.expr, "Descriptor, e.g. \"Omega([F(2)], F(3))\"")->required();
  height_cmd->add_option("--depth-limit", height.depth_limit, "Give up after this many derivatives")
      ->check(CLI::Range(1, 100000));

  PlanArgs pl;
  auto* plan_cmd = app.add_subcommand("plan", "Construction plan of a map C(I) -> C(K)");
  plan_cmd->add_option("expr", pl.expr, "Descriptor")->required();
  plan_cmd->add_option("--blocks", pl.blocks, "Blocks listed under each glue node")->check(CLI::Range(1, 16));
  plan_cmd->add_flag("--json", pl.json, "Print the plan as JSON");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*decompose_cmd) return cmd_decompose(dec, out, err);
    if (*verify_cmd) return cmd_verify(ver, out, err);
    if (*height_cmd) return cmd_fdheight(height, out);
    if (*plan_cmd) return cmd_plan(pl, out);
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << "\n";
    return kContract;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return run(std::span<const std::string>(args), out, err);
}

}  // namespace ldom::cli
