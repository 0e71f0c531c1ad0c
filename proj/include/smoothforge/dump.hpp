#pragma once

#include <string>
#include <vector>

#include "smoothforge/assemble.hpp"

namespace smoothforge {

/// Serializes arrays in the sampler's native dump syntax, one per line:
///   "n" <- 200
///   "y" <- c(0.5, 1.25)
///   "X" <- structure(c(...column-major...), .Dim = c(200, 43))
/// Reals use the shortest round-trip decimal form.
std::string write_dump(const std::vector<NamedArray>& arrays);

}  // namespace smoothforge
