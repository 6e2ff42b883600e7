#include "ldom/fd.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "ldom/errors.hpp"

namespace ldom {

struct SpaceDescriptor::Node {
  Kind kind = Kind::Empty;
  int dim = 0;
  std::vector<SpaceDescriptor> blocks;
  std::vector<SpaceDescriptor> remainder;  // exactly one entry for Omega
};

SpaceDescriptor SpaceDescriptor::empty() {
  static const auto node = std::make_shared<const Node>();
  return SpaceDescriptor(node);
}

SpaceDescriptor SpaceDescriptor::fd(int dim) {
  if (dim < 0) throw ParameterError("FD dimension must be >= 0");
  auto node = std::make_shared<Node>();
  node->kind = Kind::FD;
  node->dim = dim;
  return SpaceDescriptor(std::move(node));
}

SpaceDescriptor SpaceDescriptor::fd_all() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::FDAll;
    return n;
  }();
  return SpaceDescriptor(node);
}

SpaceDescriptor SpaceDescriptor::omega(std::vector<SpaceDescriptor> blocks, SpaceDescriptor remainder) {
  if (blocks.empty()) throw StructuralError("Omega needs at least one block kind");
  for (const auto& b : blocks) {
    if (b.is_empty()) throw StructuralError("Omega blocks must be non-empty");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Omega;
  node->blocks = std::move(blocks);
  node->remainder.push_back(std::move(remainder));
  return SpaceDescriptor(std::move(node));
}

SpaceDescriptor::Kind SpaceDescriptor::kind() const noexcept { return node_->kind; }

int SpaceDescriptor::dim() const {
  if (kind() != Kind::FD) throw StructuralError("dim() of a non-FD descriptor");
  return node_->dim;
}

const std::vector<SpaceDescriptor>& SpaceDescriptor::blocks() const {
  if (kind() != Kind::Omega) throw StructuralError("blocks() of a non-Omega descriptor");
  return node_->blocks;
}

const SpaceDescriptor& SpaceDescriptor::remainder() const {
  if (kind() != Kind::Omega) throw StructuralError("remainder() of a non-Omega descriptor");
  return node_->remainder.front();
}

bool operator==(const SpaceDescriptor& x, const SpaceDescriptor& y) {
  if (x.node_ == y.node_) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case SpaceDescriptor::Kind::Empty:
    case SpaceDescriptor::Kind::FDAll: return true;
    case SpaceDescriptor::Kind::FD: return x.dim() == y.dim();
    case SpaceDescriptor::Kind::Omega: return x.blocks() == y.blocks() && x.remainder() == y.remainder();
  }
  return false;
}

std::string to_string(const SpaceDescriptor& d) {
  switch (d.kind()) {
    case SpaceDescriptor::Kind::Empty: return "Empty";
    case SpaceDescriptor::Kind::FD: return "FD(" + std::to_string(d.dim()) + ")";
    case SpaceDescriptor::Kind::FDAll: return "FD(*)";
    case SpaceDescriptor::Kind::Omega: {
      std::string out = "Omega([";
      for (std::size_t i = 0; i < d.blocks().size(); ++i) {
        if (i > 0) out += ", ";
        out += to_string(d.blocks()[i]);
      }
      return out + "], " + to_string(d.remainder()) + ")";
    }
  }
  return "?";
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  SpaceDescriptor parse_all() {
    SpaceDescriptor d = parse();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return d;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a descriptor");
    return std::string(s_.substr(start, pos_ - start));
  }

  int integer(bool skip_ws = true) {
    if (skip_ws) skip();
    const std::size_t start = pos_;
    long long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1'000'000) fail("integer too large");
      ++pos_;
    }
    if (start == pos_) fail("expected a non-negative integer");
    return static_cast<int>(v);
  }

  SpaceDescriptor parse() {
    const std::size_t start = (skip(), pos_);
    const std::string name = ident();
    if (name == "Empty") return SpaceDescriptor::empty();
    if (name == "FD") {
      expect('(');
      if (accept('*')) {
        expect(')');
        return SpaceDescriptor::fd_all();
      }
      const int n = integer();
      expect(')');
      return SpaceDescriptor::fd(n);
    }
    if (name == "F") {
      int k = 0;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        k = integer(false);
      } else {
        expect('(');
        k = integer();
        expect(')');
      }
      if (k < 1) {
        pos_ = start;
        fail("F(k) needs k >= 1");
      }
      return build_F(k);
    }
    if (name == "Omega") {
      expect('(');
      expect('[');
      std::vector<SpaceDescriptor> blocks;
      do {
        const std::size_t at = (skip(), pos_);
        SpaceDescriptor b = parse();
        if (b.is_empty()) {
          pos_ = at;
          fail("Omega blocks must be non-empty");
        }
        blocks.push_back(std::move(b));
      } while (accept(','));
      expect(']');
      expect(',');
      SpaceDescriptor rem = parse();
      expect(')');
      return SpaceDescriptor::omega(std::move(blocks), std::move(rem));
    }
    pos_ = start;
    fail("unknown descriptor '" + name + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

bool bounded_fd(const SpaceDescriptor& d) { return d.kind() == SpaceDescriptor::Kind::FD; }

PlanPtr base_plan(const SpaceDescriptor& d, Rational recorded) {
  nlohmann::json params{{"space", to_string(d)}};
  if (d.kind() == SpaceDescriptor::Kind::FD && d.dim() == 0) {
    params["at"] = 0.0;
    return make_plan(PlanKind::PointEvaluation, recorded, {}, std::move(params));
  }
  if (d.kind() == SpaceDescriptor::Kind::FD && d.dim() == 1) {
    return make_plan(PlanKind::IdentityBase, recorded, {}, std::move(params));
  }
  int dim = 0;
  if (d.kind() == SpaceDescriptor::Kind::FD) {
    dim = d.dim();
  } else {
    // Finite-dimensional Omega: its dimension bounds every block and the remainder.
    std::function<int(const SpaceDescriptor&)> dimension = [&](const SpaceDescriptor& x) -> int {
      if (x.kind() == SpaceDescriptor::Kind::FD) return x.dim();
      if (x.kind() != SpaceDescriptor::Kind::Omega) return 0;
      int m = dimension(x.remainder());
      for (const auto& b : x.blocks()) m = std::max(m, dimension(b));
      return m;
    };
    dim = std::max(1, dimension(d));
  }
  const KstParams kp = make_params(std::max(dim, 1), recorded);
  nlohmann::json kparams = to_json(kp);
  kparams["space"] = to_string(d);
  return make_plan(PlanKind::KolmogorovBase, recorded, {}, std::move(kparams));
}

std::vector<double> glue_interval(std::size_t n) {
  const double h = std::ldexp(1.0, -static_cast<int>(n));
  return {1.5 * h, 2.0 * h};
}

}  // namespace

SpaceDescriptor parse_descriptor(std::string_view text) { return Parser(text).parse_all(); }

SpaceDescriptor derive(const SpaceDescriptor& d) {
  switch (d.kind()) {
    case SpaceDescriptor::Kind::Empty:
    case SpaceDescriptor::Kind::FD:
    case SpaceDescriptor::Kind::FDAll: return SpaceDescriptor::empty();
    case SpaceDescriptor::Kind::Omega: break;
  }
  const auto& blocks = d.blocks();
  if (std::all_of(blocks.begin(), blocks.end(), bounded_fd)) return derive(d.remainder());
  std::vector<SpaceDescriptor> derived;
  for (const auto& b : blocks) {
    SpaceDescriptor db = derive(b);
    if (!db.is_empty() && std::find(derived.begin(), derived.end(), db) == derived.end()) derived.push_back(db);
  }
  if (derived.empty()) return d.remainder();
  return SpaceDescriptor::omega(std::move(derived), d.remainder());
}

std::string HeightResult::to_string() const {
  return finite ? "Finite(" + std::to_string(value) + ")" : "ExceededDepth(" + std::to_string(value) + ")";
}

HeightResult fd_height(const SpaceDescriptor& d, int depth_limit) {
  if (depth_limit < 1) throw ParameterError("depth limit must be >= 1");
  SpaceDescriptor cur = d;
  int count = 0;
  while (!cur.is_empty()) {
    if (count == depth_limit) return {false, depth_limit};
    cur = derive(cur);
    ++count;
  }
  return {true, count};
}

SpaceDescriptor build_F(int k) {
  if (k < 1) throw ParameterError("build_F: k must be >= 1");
  if (k == 1) return SpaceDescriptor::fd(1);
  const SpaceDescriptor f2 = SpaceDescriptor::omega({SpaceDescriptor::fd_all()}, SpaceDescriptor::fd(0));
  SpaceDescriptor out = f2;
  for (int i = 3; i <= k; ++i) out = SpaceDescriptor::omega({f2}, out);
  return out;
}

SpaceDescriptor omega_block(const SpaceDescriptor& omega, std::size_t n) {
  if (n < 1) throw ParameterError("block numbers start at 1");
  const auto& kinds = omega.blocks();
  const SpaceDescriptor& b = kinds[(n - 1) % kinds.size()];
  if (b.kind() == SpaceDescriptor::Kind::FDAll) return SpaceDescriptor::fd(static_cast<int>(n));
  return b;
}

PlanPtr plan(const SpaceDescriptor& d, const PlanOptions& options) {
  const HeightResult h = fd_height(d, 64);
  if (!h.finite) throw UnsupportedInput("plan: fd-height of " + to_string(d) + " exceeds the depth limit");
  if (h.value == 0) throw UnsupportedInput("plan: the empty space has no construction");
  if (options.blocks < 1) throw ParameterError("plan: need at least one block");
  if (h.value == 1) return base_plan(d, d.kind() == SpaceDescriptor::Kind::FD && d.dim() <= 1 ? Rational(1) : Rational(8));

  const int k = h.value - 1;
  SpaceDescriptor core = d;
  for (int i = 0; i < k; ++i) core = derive(core);

  std::vector<PlanPtr> blocks;
  nlohmann::json intervals = nlohmann::json::array();
  for (std::size_t n = 1; n <= options.blocks; ++n) {
    blocks.push_back(plan(omega_block(d, n), options));
    intervals.push_back(glue_interval(n));
  }
  const Rational c_k = pow(Rational(8), static_cast<unsigned>(k));
  PlanPtr glue = make_plan(PlanKind::BlockGlue, c_k, std::move(blocks),
                           {{"space", to_string(d)}, {"intervals", std::move(intervals)}, {"blocks", options.blocks}});
  PlanPtr norm = make_plan(PlanKind::NormalizeAtZero, Rational(2), {}, {{"interval", {0.0, 1.0}}});
  PlanPtr left = make_plan(PlanKind::Compose, Rational(2) * c_k, {norm, glue}, {{"interval", {0.0, 1.0 / 3.0}}});
  PlanPtr right = base_plan(core, Rational(2));
  return make_plan(PlanKind::PairSplit, pow(Rational(8), static_cast<unsigned>(h.value)), {left, right},
                   {{"space", to_string(d)},
                    {"core", to_string(core)},
                    {"left", {0.0, 1.0 / 3.0}},
                    {"right", {2.0 / 3.0, 1.0}}});
}

// ---------------------------------------------------------------------------
// Gluing

GlueData make_glue(DomainPtr space, std::vector<CGoodMap> block_maps, double tail_bound, std::size_t source_intervals) {
  const auto* tbs = space->as<TruncatedBlockSum>();
  if (!tbs || !tbs->has_infinity) throw StructuralError("make_glue: expected a block sum with an infinity site");
  if (block_maps.size() != tbs->blocks.size()) {
    throw StructuralError("make_glue: " + std::to_string(tbs->blocks.size()) + " blocks but " +
                          std::to_string(block_maps.size()) + " per-block maps");
  }
  if (!(tail_bound > 0.0)) throw ParameterError("make_glue: tail bound must be positive");

  GlueData gd;
  gd.space = space;
  gd.tail_bound = tail_bound;

  std::size_t q = source_intervals;
  if (q == 0) {
    q = 1;
    for (std::size_t i = 0; i < block_maps.size(); ++i) {
      const std::size_t steps = block_maps[i].source().domain->site_count() - 1;
      q = std::lcm(q, steps << (i + 2));
    }
  }
  gd.source = CompactDomain::interval(0.0, 1.0, q + 1);

  for (std::size_t i = 0; i < block_maps.size(); ++i) {
    const std::size_t n = i + 1;
    const Cube& block = tbs->blocks[i];
    if (!same_domain(block_maps[i].target().domain, CompactDomain::cube(block.dim, block.res))) {
      throw StructuralError("make_glue: map " + std::to_string(n) + " does not target block " + std::to_string(n));
    }
    const std::size_t part = std::size_t{1} << (n + 1);
    if (q % part != 0) throw ResolutionError("make_glue: source grid does not contain I_" + std::to_string(n));
    const auto iv = glue_interval(n);
    gd.intervals.push_back(CompactDomain::interval(iv[0], iv[1], q / part + 1));
    gd.block_maps.push_back(reparametrize(block_maps[i], gd.intervals.back()));
    gd.constant = std::max(gd.constant, block_maps[i].constant());

    std::vector<double> p(space->site_count(), 0.0);
    const std::size_t off = space->block_offset(i);
    std::fill(p.begin() + static_cast<std::ptrdiff_t>(off),
              p.begin() + static_cast<std::ptrdiff_t>(off + space->block_size(i)), 1.0);
    gd.partition.emplace_back(space, std::move(p));
  }
  return gd;
}

SampledFn glue_apply(const GlueData& gd, const SampledFn& g) {
  if (!same_domain(g.domain_ptr(), gd.source)) throw StructuralError("glue_apply: g is not on the glue source grid");
  if (std::abs(g[0]) > 1e-9 * std::max(1.0, sup_norm(g))) {
    throw ContractViolation("glue_apply: g does not vanish at 0 (g(0) = " + std::to_string(g[0]) + ")");
  }
  std::vector<double> out(gd.space->site_count(), 0.0);
  for (std::size_t i = 0; i < gd.block_maps.size(); ++i) {
    const SampledFn image = gd.block_maps[i].apply(restrict(g, gd.intervals[i]));
    const std::size_t off = gd.space->block_offset(i);
    const SampledFn& p = gd.partition[i];
    for (std::size_t j = 0; j < image.size(); ++j) out[off + j] += image[j] * p[off + j];
  }
  return SampledFn(gd.space, std::move(out));
}

SampledFn glue_lift(const GlueData& gd, const SampledFn& f) {
  if (!same_domain(f.domain_ptr(), gd.space)) throw StructuralError("glue_lift: f is not on the glued space");
  const double fn = sup_norm(f);
  const std::size_t inf = *gd.space->infinity_site();
  if (std::abs(f[inf]) > 1e-9 * std::max(1.0, fn)) {
    throw ContractViolation("glue_lift: f does not vanish at infinity");
  }
  const std::size_t last = gd.block_maps.size() - 1;
  const double tail = sup_norm(block_values(f, last));
  if (tail > gd.tail_bound * fn * (1.0 + 1e-12)) {
    throw ContractViolation("glue_lift: last block carries " + std::to_string(tail / fn) +
                            " of ||f||, above the tail bound " + std::to_string(gd.tail_bound));
  }
  std::vector<SampledFn> pieces;
  for (std::size_t i = 0; i < gd.block_maps.size(); ++i) pieces.push_back(gd.block_maps[i].lift(block_values(f, i)));
  const std::pair<double, double> anchor{0.0, 0.0};
  return assemble_piecewise(pieces, *gd.source->as<Interval>(), std::span(&anchor, 1));
}

CGoodMap glue_map(const GlueData& gd, Rational recorded) {
  if (recorded < gd.constant) throw ParameterError("glue_map: recorded constant below the block constants");
  auto data = std::make_shared<const GlueData>(gd);
  std::vector<PlanPtr> children;
  for (const auto& m : gd.block_maps) {
    if (m.plan()) children.push_back(m.plan());
  }
  return CGoodMap(
      "glue", recorded, Space(gd.source, {0}), Space(gd.space, {*gd.space->infinity_site()}),
      [data](const SampledFn& g) { return glue_apply(*data, g); },
      [data](const SampledFn& f) { return glue_lift(*data, f); },
      make_plan(PlanKind::BlockGlue, recorded, std::move(children)));
}

// ---------------------------------------------------------------------------
// Realization

DomainPtr realize_space(const SpaceDescriptor& d, std::size_t blocks, const RealizeOptions& options) {
  if (d.kind() == SpaceDescriptor::Kind::FD) {
    return CompactDomain::cube(static_cast<std::size_t>(d.dim()), options.cube_res(d.dim()));
  }
  if (d.kind() == SpaceDescriptor::Kind::Omega && d.remainder() == SpaceDescriptor::fd(0)) {
    std::vector<Cube> cubes;
    for (std::size_t n = 1; n <= blocks; ++n) {
      const SpaceDescriptor b = omega_block(d, n);
      if (b.kind() != SpaceDescriptor::Kind::FD) break;
      cubes.push_back({static_cast<std::size_t>(b.dim()), options.cube_res(b.dim())});
    }
    if (cubes.size() == blocks) return CompactDomain::block_sum(std::move(cubes), true);
  }
  throw UnsupportedInput("no grid realization for " + to_string(d) +
                         " (supported: FD(d) and Omega of finite-dimensional blocks with a one-point remainder)");
}

namespace {

class Realizer {
 public:
  explicit Realizer(const RealizeOptions& options) : opt_(options) {}

  std::size_t divisor(const PlanNode& node) {
    switch (node.kind) {
      case PlanKind::PointEvaluation:
      case PlanKind::NormalizeAtZero: return 1;
      case PlanKind::IdentityBase: return opt_.cube_res(1) - 1;
      case PlanKind::KolmogorovBase: {
        const InnerPtr& inner = inner_for(node);
        return static_cast<std::size_t>(2 * inner->params().m + 2) * (inner->univariate()->site_count() - 1);
      }
      case PlanKind::Compose: {
        std::size_t d = 1;
        for (const auto& c : node.children) d = std::lcm(d, divisor(*c));
        return d;
      }
      case PlanKind::BlockGlue: {
        std::size_t d = 1;
        for (std::size_t i = 0; i < node.children.size(); ++i) d = std::lcm(d, divisor(*node.children[i]) << (i + 2));
        return d;
      }
      case PlanKind::PairSplit: return 3 * std::lcm(divisor(*node.children.at(0)), divisor(*node.children.at(1)));
      case PlanKind::Projection:
      case PlanKind::RestrictExtend: break;
    }
    throw UnsupportedInput("realize: plan node " + std::string(to_string(node.kind)) + " is not realizable");
  }

  /// Map from C([0,1]) on `steps` grid intervals into C(target).
  CGoodMap build(const PlanPtr& node, std::size_t steps, DomainPtr target) {
    const auto source = CompactDomain::interval(0.0, 1.0, steps + 1);
    const std::string space = node->params.value("space", std::string());
    const std::string id = std::string(to_string(node->kind)) + (space.empty() ? "" : "(" + space + ")");
    switch (node->kind) {
      case PlanKind::PointEvaluation: {
        if (!target) target = CompactDomain::point();
        return point_evaluation_map(source, node->params.value("at", 0.0), target, node->constant).relabel(id, node);
      }
      case PlanKind::IdentityBase: {
        if (!target) target = CompactDomain::cube(1, opt_.cube_res(1));
        return affine_map(source, target).relabel(id, node, node->constant);
      }
      case PlanKind::KolmogorovBase: {
        const InnerPtr& inner = inner_for(*node);
        if (target && !same_domain(target, inner->cube())) {
          throw StructuralError("realize: Kolmogorov leaf grid does not match " + target->describe());
        }
        KolmogorovOptions ko;
        ko.refinement = steps / (divisor(*node));
        ko.stop = opt_.stop;
        ko.slack = opt_.slack;
        return kolmogorov_map(inner, ko).relabel(id, node, node->constant);
      }
      case PlanKind::NormalizeAtZero: return normalize_at_zero(source).relabel(id, node);
      case PlanKind::Compose: {
        std::optional<CGoodMap> acc;
        for (std::size_t i = 0; i < node->children.size(); ++i) {
          const bool last = i + 1 == node->children.size();
          CGoodMap m = build(node->children[i], steps, last ? target : nullptr);
          acc = acc ? compose(*acc, m) : m;
        }
        if (!acc) throw StructuralError("realize: empty Compose node");
        return acc->relabel(id, node, node->constant);
      }
      case PlanKind::BlockGlue: {
        const auto d = parse_descriptor(space);
        DomainPtr K = target ? target : realize_space(d, node->children.size(), opt_);
        const auto* tbs = K->as<TruncatedBlockSum>();
        if (!tbs || tbs->blocks.size() != node->children.size()) {
          throw UnsupportedInput("realize: BlockGlue needs a block sum with one block per child");
        }
        std::vector<CGoodMap> maps;
        for (std::size_t i = 0; i < node->children.size(); ++i) {
          const Cube& c = tbs->blocks[i];
          maps.push_back(build(node->children[i], steps >> (i + 2), CompactDomain::cube(c.dim, c.res)));
        }
        const GlueData gd = make_glue(K, std::move(maps), opt_.tail_bound, steps);
        return glue_map(gd, node->constant).relabel(id, node);
      }
      case PlanKind::PairSplit: return build_pair_split(node, steps, source, id);
      case PlanKind::Projection:
      case PlanKind::RestrictExtend: break;
    }
    throw UnsupportedInput("realize: plan node " + std::string(to_string(node->kind)) + " is not realizable");
  }

 private:
  CGoodMap build_pair_split(const PlanPtr& node, std::size_t steps, const DomainPtr& source, const std::string& id) {
    const auto d = parse_descriptor(node->params.at("space").get<std::string>());
    const auto core = parse_descriptor(node->params.at("core").get<std::string>());
    const PlanPtr& left_plan = node->children.at(0);
    const PlanPtr& right_plan = node->children.at(1);
    std::size_t blocks = 0;
    for (const auto& c : left_plan->children) {
      if (c->kind == PlanKind::BlockGlue) blocks = c->children.size();
    }
    const DomainPtr K = realize_space(d, blocks, opt_);
    const auto inf = K->infinity_site();
    if (!(core == SpaceDescriptor::fd(0)) || !inf) {
      throw UnsupportedInput("realize: only spaces whose last derivative is the point at infinity are realizable");
    }
    const Extender e = dugundji_extender(K, CompactDomain::point(), {*inf});
    const std::size_t third = steps / 3;
    const CGoodMap left = reparametrize(build(left_plan, third, K), CompactDomain::interval(0.0, 1.0 / 3.0, third + 1));
    const CGoodMap right =
        reparametrize(build(right_plan, third, e.subset()), CompactDomain::interval(2.0 / 3.0, 1.0, third + 1));
    auto split = std::make_shared<const PairSplit>(e);
    const Interval grid = *source->as<Interval>();
    return CGoodMap(
        id, node->constant, Space(source), Space(K),
        [left, right, split](const SampledFn& g) {
          const SampledFn a = left.apply(restrict(g, left.source().domain));
          const SampledFn b = right.apply(restrict(g, right.source().domain));
          return scale(0.5, split->forward(a, b));
        },
        [left, right, split, grid](const SampledFn& f) {
          auto [f1, f2] = split->inverse(scale(2.0, f));
          const std::vector<SampledFn> pieces{left.lift(f1), right.lift(f2)};
          return assemble_piecewise(pieces, grid);
        },
        node);
  }

  const InnerPtr& inner_for(const PlanNode& node) {
    const auto sp = parse_descriptor(node.params.at("space").get<std::string>());
    if (sp.kind() != SpaceDescriptor::Kind::FD) {
      throw UnsupportedInput("realize: no embedding supplied for " + to_string(sp));
    }
    const int n = node.params.at("n").get<int>();
    const Rational c = Rational::parse(node.params.at("c").get<std::string>());
    const std::string key = std::to_string(n) + "/" + c.to_string();
    auto it = inner_.find(key);
    if (it == inner_.end()) {
      it = inner_.emplace(key, InnerFamily::build(make_params(n, c), {opt_.cube_res(n)})).first;
    }
    return it->second;
  }

  const RealizeOptions& opt_;
  std::map<std::string, InnerPtr> inner_;
};

}  // namespace

CGoodMap realize(const PlanPtr& p, const RealizeOptions& options) {
  if (!p) throw StructuralError("realize: missing plan");
  Realizer r(options);
  const std::size_t steps = r.divisor(*p);
  return r.build(p, steps, nullptr);
}

}  // namespace ldom
