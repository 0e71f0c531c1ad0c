#pragma once

#include <string>
#include <vector>

#include "smoothforge/assemble.hpp"

namespace smoothforge {

struct CodegenOptions {
  SmoothingPrior sp_prior = SmoothingPrior::gamma;
  double log_uniform_lo = -12;
  double log_uniform_hi = 12;
  /// Informational: diagonalization is baked into the Prefit's terms.
  bool diagonalize = false;
};

CodegenOptions codegen_options(const Prefit& prefit);

/// The complete JAGS model file (LF line endings).
std::string emit_model(const Prefit& prefit, const CodegenOptions& options);

/// Prior lines for one smooth; `term_number` is 1-based and names K<n>/S<n>.
std::vector<std::string> smooth_prior_block(const SmoothBlock& block, int term_number);

/// Smoothing parameter prior loop; empty when sp_count is zero.
std::vector<std::string> sp_prior_block(int sp_count, const CodegenOptions& options);

/// Data-dependent constants: at most 6 significant digits.
std::string format_constant(double v);

}  // namespace smoothforge
