#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldom/sampled_fn.hpp"

namespace ldom {

using NamedFn = std::function<double(std::span<const double>)>;

/// zero, const1, xy (product of coordinates), sumsq, sinsin
/// (product of sin(pi x_p)), maxcoord.
const std::vector<std::string>& named_function_names();

/// Throws ParameterError for an unknown name.
NamedFn named_function(std::string_view name);

/// xy, sumsq, sinsin and maxcoord sampled on `domain`.
std::vector<SampledFn> standard_corpus(const DomainPtr& domain);

/// Functions on a block sum that vanish at infinity and have norm 2^-n on
/// block n, one per non-zero named function.
std::vector<SampledFn> block_corpus(const DomainPtr& block_sum);

}  // namespace ldom
