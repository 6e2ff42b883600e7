#include "ldom/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ldom/errors.hpp"

namespace ldom {

const std::vector<std::string>& named_function_names() {
  static const std::vector<std::string> names{"zero", "const1", "xy", "sumsq", "sinsin", "maxcoord"};
  return names;
}

NamedFn named_function(std::string_view name) {
  if (name == "zero") return [](std::span<const double>) { return 0.0; };
  if (name == "const1") return [](std::span<const double>) { return 1.0; };
  if (name == "xy") {
    return [](std::span<const double> x) {
      double r = 1.0;
      for (double v : x) r *= v;
      return r;
    };
  }
  if (name == "sumsq") {
    return [](std::span<const double> x) {
      double r = 0.0;
      for (double v : x) r += v * v;
      return r;
    };
  }
  if (name == "sinsin") {
    return [](std::span<const double> x) {
      double r = 1.0;
      for (double v : x) r *= std::sin(std::numbers::pi * v);
      return r;
    };
  }
  if (name == "maxcoord") {
    return [](std::span<const double> x) {
      double r = x.empty() ? 0.0 : x[0];
      for (double v : x) r = std::max(r, v);
      return r;
    };
  }
  throw ParameterError("unknown function '" + std::string(name) + "'");
}

std::vector<SampledFn> standard_corpus(const DomainPtr& domain) {
  std::vector<SampledFn> out;
  for (const char* name : {"xy", "sumsq", "sinsin", "maxcoord"}) out.push_back(SampledFn::sample(domain, named_function(name)));
  return out;
}

std::vector<SampledFn> block_corpus(const DomainPtr& block_sum) {
  const auto* tbs = block_sum->as<TruncatedBlockSum>();
  if (!tbs) throw StructuralError("block_corpus: expected a block sum");
  std::vector<SampledFn> out;
  for (const auto& name : named_function_names()) {
    if (name == "zero") continue;
    const NamedFn fn = named_function(name);
    std::vector<double> values(block_sum->site_count(), 0.0);
    for (std::size_t n = 0; n < tbs->blocks.size(); ++n) {
      const auto cube = CompactDomain::cube(tbs->blocks[n].dim, tbs->blocks[n].res);
      const SampledFn local = SampledFn::sample(cube, fn);
      const double norm = sup_norm(local);
      if (norm == 0.0) throw StructuralError("block_corpus: function vanishes on a block");
      const double target = std::ldexp(1.0, -static_cast<int>(n + 1));
      const std::size_t off = block_sum->block_offset(n);
      for (std::size_t j = 0; j < local.size(); ++j) values[off + j] = local[j] / norm * target;
    }
    out.emplace_back(block_sum, std::move(values));
  }
  return out;
}

}  // namespace ldom
