#include "ldom/grid_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "ldom/errors.hpp"

namespace ldom {

namespace {

struct Table {
  std::size_t coords = 0;
  std::vector<std::vector<double>> rows;  // coordinates then value
};

double parse_field(const std::string& text, std::size_t line) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw StructuralError("grid csv line " + std::to_string(line) + ": bad number '" + text + "'");
  }
}

Table read_table(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw StructuralError("grid csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header.back() != "value") throw StructuralError("grid csv: last header column must be 'value'");
  for (std::size_t i = 0; i + 1 < header.size(); ++i) {
    if (header[i] != "coord_" + std::to_string(i + 1)) throw StructuralError("grid csv: bad header column " + header[i]);
  }
  Table t;
  t.coords = header.size() - 1;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_field(cell, lineno));
    if (row.size() != header.size()) throw StructuralError("grid csv line " + std::to_string(lineno) + ": wrong column count");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

void write_grid_csv(std::ostream& os, const SampledFn& f) {
  const CompactDomain& d = f.domain();
  const std::size_t k = d.coord_count();
  for (std::size_t i = 0; i < k; ++i) os << "coord_" << (i + 1) << ',';
  os << "value\n";
  os.precision(17);
  for (std::size_t s = 0; s < f.size(); ++s) {
    const auto x = d.coords(s);
    for (double c : x) {
      if (std::isinf(c)) {
        os << "inf,";
      } else {
        os << c << ',';
      }
    }
    os << f[s] << '\n';
  }
}

SampledFn read_grid_csv(std::istream& is, const DomainPtr& domain) {
  const Table t = read_table(is);
  if (t.coords != domain->coord_count()) throw StructuralError("grid csv: coordinate count does not match domain");
  if (t.rows.size() != domain->site_count()) {
    throw StructuralError("grid csv: " + std::to_string(t.rows.size()) + " rows for " +
                          std::to_string(domain->site_count()) + " sites");
  }
  std::vector<double> values(t.rows.size());
  for (std::size_t s = 0; s < t.rows.size(); ++s) {
    const auto expect = domain->coords(s);
    for (std::size_t c = 0; c < t.coords; ++c) {
      const double got = t.rows[s][c];
      const bool ok = std::isinf(expect[c]) ? std::isinf(got) : std::abs(got - expect[c]) <= 1e-9;
      if (!ok) throw StructuralError("grid csv: row " + std::to_string(s + 1) + " is not in grid order");
    }
    values[s] = t.rows[s].back();
  }
  return SampledFn(domain, std::move(values));
}

SampledFn read_grid_csv(std::istream& is) {
  const Table t = read_table(is);
  if (t.rows.empty()) throw StructuralError("grid csv: no rows");
  if (t.coords == 0) throw StructuralError("grid csv: cannot infer a domain without coordinates");
  DomainPtr domain;
  if (t.coords == 1) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& r : t.rows) {
      lo = std::min(lo, r[0]);
      hi = std::max(hi, r[0]);
    }
    domain = CompactDomain::interval(lo, hi, t.rows.size());
  } else {
    std::set<double> axis;
    for (const auto& r : t.rows) axis.insert(r[0]);
    domain = CompactDomain::cube(t.coords, axis.size());
  }
  std::vector<double> values(t.rows.size());
  if (values.size() != domain->site_count()) throw StructuralError("grid csv: rows do not form a full grid");
  for (std::size_t s = 0; s < values.size(); ++s) {
    const auto expect = domain->coords(s);
    for (std::size_t c = 0; c < t.coords; ++c) {
      if (std::abs(t.rows[s][c] - expect[c]) > 1e-9) throw StructuralError("grid csv: rows are not a uniform grid");
    }
    values[s] = t.rows[s].back();
  }
  return SampledFn(domain, std::move(values));
}

}  // namespace ldom
