#pragma once

#include <iosfwd>

#include "ldom/sampled_fn.hpp"

namespace ldom {

/// Grid-function CSV: header `coord_1,...,coord_d,value`, one row per site in
/// the domain's site order; the infinity site of a block sum is the last row
/// with every coordinate written as `inf`.
void write_grid_csv(std::ostream& os, const SampledFn& f);

/// Reads values for a known domain, checking row count and site coordinates.
SampledFn read_grid_csv(std::istream& is, const DomainPtr& domain);

/// Reads an interval (one coordinate) or unit-cube (two or more coordinates)
/// grid, inferring its resolution from the rows.
SampledFn read_grid_csv(std::istream& is);

}  // namespace ldom
