#include "ldom/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ldom/errors.hpp"

namespace ldom {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_interval(const Interval& iv, const char* what) {
  if (!std::isfinite(iv.a) || !std::isfinite(iv.b) || !(iv.a < iv.b)) {
    throw StructuralError(std::string(what) + ": interval needs finite a < b");
  }
  if (iv.res < 2) throw StructuralError(std::string(what) + ": interval resolution must be >= 2");
}

void validate_cube(const Cube& c) {
  if (c.dim > 0 && c.res < 2) throw StructuralError("cube: resolution must be >= 2");
  if (c.dim > 8) throw StructuralError("cube: dimension above 8 is not supported");
}

std::size_t max_block_dim(const TruncatedBlockSum& s) {
  std::size_t d = 0;
  for (const auto& b : s.blocks) d = std::max(d, b.dim);
  return d;
}

bool same_interval(const Interval& x, const Interval& y) { return x.a == y.a && x.b == y.b && x.res == y.res; }

std::optional<std::size_t> locate_on_interval(const Interval& iv, double x, double tol) {
  if (!iv.contains(x, tol)) return std::nullopt;
  const double t = (x - iv.a) / iv.spacing();
  const auto i = static_cast<std::size_t>(std::clamp(std::llround(t), 0LL, static_cast<long long>(iv.res - 1)));
  if (std::abs(iv.site(i) - x) <= tol) return i;
  return std::nullopt;
}

}  // namespace

std::size_t cube_site_count(const Cube& c) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < c.dim; ++i) n *= c.res;
  return n;
}

std::vector<std::size_t> cube_index(const Cube& c, std::size_t site) {
  std::vector<std::size_t> idx(c.dim);
  for (std::size_t p = c.dim; p-- > 0;) {
    idx[p] = site % c.res;
    site /= c.res;
  }
  return idx;
}

CompactDomain::CompactDomain(Variant v) : v_(std::move(v)) {
  site_count_ = std::visit(
      Overloaded{
          [](const Interval& iv) {
            validate_interval(iv, "Interval");
            return iv.res;
          },
          [](const Cube& c) {
            validate_cube(c);
            return cube_site_count(c);
          },
          [](const SubIntervalList& s) {
            validate_interval(s.parent, "SubIntervalList parent");
            if (s.pieces.empty() && s.anchors.empty()) throw StructuralError("SubIntervalList: no pieces");
            std::vector<Interval> sorted = s.pieces;
            for (const auto& p : sorted) {
              validate_interval(p, "SubIntervalList piece");
              if (p.a < s.parent.a - 1e-12 || p.b > s.parent.b + 1e-12) {
                throw StructuralError("SubIntervalList: piece not contained in parent");
              }
            }
            std::sort(sorted.begin(), sorted.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
            for (std::size_t i = 1; i < sorted.size(); ++i) {
              if (!(sorted[i].a > sorted[i - 1].b)) throw StructuralError("SubIntervalList: pieces overlap");
            }
            for (std::size_t i = 0; i < s.anchors.size(); ++i) {
              const double x = s.anchors[i];
              if (!s.parent.contains(x)) throw StructuralError("SubIntervalList: anchor outside parent");
              for (const auto& p : s.pieces) {
                if (p.contains(x, 0.0)) throw StructuralError("SubIntervalList: anchor inside a piece");
              }
              for (std::size_t j = 0; j < i; ++j) {
                if (s.anchors[j] == x) throw StructuralError("SubIntervalList: duplicate anchor");
              }
            }
            std::size_t n = s.anchors.size();
            for (const auto& p : s.pieces) n += p.res;
            return n;
          },
          [](const TruncatedBlockSum& s) {
            if (s.blocks.empty()) throw StructuralError("TruncatedBlockSum: no blocks");
            std::size_t n = s.has_infinity ? 1 : 0;
            for (const auto& b : s.blocks) {
              validate_cube(b);
              n += cube_site_count(b);
            }
            return n;
          },
          [](const SiteSubset& s) {
            if (!s.parent) throw StructuralError("SiteSubset: missing parent");
            if (s.sites.empty()) throw StructuralError("SiteSubset: empty site set");
            std::vector<std::size_t> sorted = s.sites;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
              throw StructuralError("SiteSubset: duplicate sites");
            }
            if (sorted.back() >= s.parent->site_count()) throw StructuralError("SiteSubset: site out of range");
            return s.sites.size();
          },
      },
      v_);
}

DomainPtr CompactDomain::interval(double a, double b, std::size_t res) {
  return std::make_shared<const CompactDomain>(Interval{a, b, res});
}

DomainPtr CompactDomain::cube(std::size_t dim, std::size_t res) {
  return std::make_shared<const CompactDomain>(Cube{dim, dim == 0 ? 1 : res});
}

DomainPtr CompactDomain::sub_intervals(Interval parent, std::vector<Interval> pieces, std::vector<double> anchors) {
  return std::make_shared<const CompactDomain>(SubIntervalList{parent, std::move(pieces), std::move(anchors)});
}

DomainPtr CompactDomain::block_sum(std::vector<Cube> blocks, bool has_infinity) {
  return std::make_shared<const CompactDomain>(TruncatedBlockSum{std::move(blocks), has_infinity});
}

DomainPtr CompactDomain::subset(DomainPtr parent, std::vector<std::size_t> sites) {
  return std::make_shared<const CompactDomain>(SiteSubset{std::move(parent), std::move(sites)});
}

std::size_t CompactDomain::coord_count() const {
  return std::visit(Overloaded{
                        [](const Interval&) -> std::size_t { return 1; },
                        [](const Cube& c) -> std::size_t { return c.dim; },
                        [](const SubIntervalList&) -> std::size_t { return 1; },
                        [](const TruncatedBlockSum& s) -> std::size_t { return 1 + max_block_dim(s); },
                        [](const SiteSubset& s) -> std::size_t { return s.parent->coord_count(); },
                    },
                    v_);
}

std::vector<double> CompactDomain::coords(std::size_t site) const {
  return std::visit(
      Overloaded{
          [&](const Interval& iv) { return std::vector<double>{iv.site(site)}; },
          [&](const Cube& c) {
            std::vector<double> x(c.dim);
            const auto idx = cube_index(c, site);
            for (std::size_t p = 0; p < c.dim; ++p) {
              x[p] = static_cast<double>(idx[p]) / static_cast<double>(c.res - 1);
            }
            return x;
          },
          [&](const SubIntervalList& s) {
            for (const auto& p : s.pieces) {
              if (site < p.res) return std::vector<double>{p.site(site)};
              site -= p.res;
            }
            return std::vector<double>{s.anchors.at(site)};
          },
          [&](const TruncatedBlockSum& s) {
            const std::size_t width = 1 + max_block_dim(s);
            for (std::size_t n = 0; n < s.blocks.size(); ++n) {
              const Cube& c = s.blocks[n];
              const std::size_t count = cube_site_count(c);
              if (site < count) {
                std::vector<double> x(width, 0.0);
                x[0] = static_cast<double>(n + 1);
                const auto idx = cube_index(c, site);
                for (std::size_t p = 0; p < c.dim; ++p) {
                  x[p + 1] = static_cast<double>(idx[p]) / static_cast<double>(c.res - 1);
                }
                return x;
              }
              site -= count;
            }
            return std::vector<double>(width, std::numeric_limits<double>::infinity());
          },
          [&](const SiteSubset& s) { return s.parent->coords(s.sites.at(site)); },
      },
      v_);
}

std::vector<double> CompactDomain::ambient(std::size_t site) const {
  if (const auto* s = as<TruncatedBlockSum>()) {
    const std::size_t width = 1 + max_block_dim(*s);
    std::vector<double> x = coords(site);
    if (is_infinity(site)) return std::vector<double>(width, 0.0);
    const double n = x[0];
    const double scale = std::pow(2.0, -n);
    x[0] = scale;
    for (std::size_t p = 1; p < width; ++p) x[p] *= scale / 4.0;
    return x;
  }
  if (const auto* s = as<SiteSubset>()) return s->parent->ambient(s->sites.at(site));
  return coords(site);
}

std::optional<std::size_t> CompactDomain::locate(std::span<const double> x, double tol) const {
  if (x.size() != coord_count()) return std::nullopt;
  return std::visit(
      Overloaded{
          [&](const Interval& iv) { return locate_on_interval(iv, x[0], tol); },
          [&](const Cube& c) -> std::optional<std::size_t> {
            std::size_t site = 0;
            const Interval axis{0.0, 1.0, c.res};
            for (std::size_t p = 0; p < c.dim; ++p) {
              const auto i = locate_on_interval(axis, x[p], tol);
              if (!i) return std::nullopt;
              site = site * c.res + *i;
            }
            return site;
          },
          [&](const SubIntervalList& s) -> std::optional<std::size_t> {
            std::size_t offset = 0;
            for (const auto& p : s.pieces) {
              if (const auto i = locate_on_interval(p, x[0], tol)) return offset + *i;
              offset += p.res;
            }
            for (std::size_t i = 0; i < s.anchors.size(); ++i) {
              if (std::abs(s.anchors[i] - x[0]) <= tol) return offset + i;
            }
            return std::nullopt;
          },
          [&](const TruncatedBlockSum& s) -> std::optional<std::size_t> {
            if (std::isinf(x[0])) return infinity_site();
            const long long n = std::llround(x[0]);
            if (n < 1 || static_cast<std::size_t>(n) > s.blocks.size() || std::abs(x[0] - n) > tol) return std::nullopt;
            const Cube& c = s.blocks[n - 1];
            for (std::size_t p = c.dim + 1; p < x.size(); ++p) {
              if (std::abs(x[p]) > tol) return std::nullopt;
            }
            const CompactDomain block(c);
            const auto local = block.locate(x.subspan(1, c.dim), tol);
            if (!local) return std::nullopt;
            return block_offset(n - 1) + *local;
          },
          [&](const SiteSubset& s) -> std::optional<std::size_t> {
            const auto parent_site = s.parent->locate(x, tol);
            if (!parent_site) return std::nullopt;
            const auto it = std::find(s.sites.begin(), s.sites.end(), *parent_site);
            if (it == s.sites.end()) return std::nullopt;
            return static_cast<std::size_t>(it - s.sites.begin());
          },
      },
      v_);
}

bool CompactDomain::is_infinity(std::size_t site) const noexcept {
  const auto inf = infinity_site();
  return inf && *inf == site;
}

std::optional<std::size_t> CompactDomain::infinity_site() const noexcept {
  if (const auto* s = as<TruncatedBlockSum>(); s && s->has_infinity) return site_count_ - 1;
  return std::nullopt;
}

std::size_t CompactDomain::block_offset(std::size_t n) const {
  const auto* s = as<TruncatedBlockSum>();
  if (!s || n >= s->blocks.size()) throw StructuralError("block_offset: not a block of a block sum");
  std::size_t offset = 0;
  for (std::size_t i = 0; i < n; ++i) offset += cube_site_count(s->blocks[i]);
  return offset;
}

std::size_t CompactDomain::block_size(std::size_t n) const {
  const auto* s = as<TruncatedBlockSum>();
  if (!s || n >= s->blocks.size()) throw StructuralError("block_size: not a block of a block sum");
  return cube_site_count(s->blocks[n]);
}

std::string CompactDomain::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Interval& iv) { os << "Interval[" << iv.a << ", " << iv.b << "; " << iv.res << "]"; },
                 [&](const Cube& c) { os << "Cube(dim " << c.dim << ", res " << c.res << ")"; },
                 [&](const SubIntervalList& s) {
                   os << "SubIntervalList(" << s.pieces.size() << " pieces, " << s.anchors.size() << " anchors)";
                 },
                 [&](const TruncatedBlockSum& s) {
                   os << "TruncatedBlockSum(" << s.blocks.size() << " blocks" << (s.has_infinity ? " + inf" : "")
                      << ")";
                 },
                 [&](const SiteSubset& s) { os << "SiteSubset(" << s.sites.size() << " sites)"; },
             },
             v_);
  return os.str();
}

bool operator==(const CompactDomain& a, const CompactDomain& b) {
  if (&a == &b) return true;
  if (a.v_.index() != b.v_.index() || a.site_count_ != b.site_count_) return false;
  return std::visit(
      Overloaded{
          [&](const Interval& x) { return same_interval(x, std::get<Interval>(b.v_)); },
          [&](const Cube& x) {
            const auto& y = std::get<Cube>(b.v_);
            return x.dim == y.dim && x.res == y.res;
          },
          [&](const SubIntervalList& x) {
            const auto& y = std::get<SubIntervalList>(b.v_);
            if (!same_interval(x.parent, y.parent) || x.anchors != y.anchors || x.pieces.size() != y.pieces.size()) {
              return false;
            }
            for (std::size_t i = 0; i < x.pieces.size(); ++i) {
              if (!same_interval(x.pieces[i], y.pieces[i])) return false;
            }
            return true;
          },
          [&](const TruncatedBlockSum& x) {
            const auto& y = std::get<TruncatedBlockSum>(b.v_);
            if (x.has_infinity != y.has_infinity || x.blocks.size() != y.blocks.size()) return false;
            for (std::size_t i = 0; i < x.blocks.size(); ++i) {
              if (x.blocks[i].dim != y.blocks[i].dim || x.blocks[i].res != y.blocks[i].res) return false;
            }
            return true;
          },
          [&](const SiteSubset& x) {
            const auto& y = std::get<SiteSubset>(b.v_);
            return x.sites == y.sites && same_domain(x.parent, y.parent);
          },
      },
      a.v_);
}

bool same_domain(const DomainPtr& a, const DomainPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

}  // namespace ldom
