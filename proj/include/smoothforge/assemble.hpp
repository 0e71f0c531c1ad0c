#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smoothforge/basis.hpp"
#include "smoothforge/family.hpp"
#include "smoothforge/formula.hpp"
#include "smoothforge/table.hpp"

namespace smoothforge {

enum class SmoothingPrior { gamma, log_uniform };

struct ModelOptions {
  bool diagonalize = false;
  SmoothingPrior sp_prior = SmoothingPrior::gamma;
  double log_uniform_lo = -12;
  double log_uniform_hi = 12;
  /// Binomial trial counts column; empty means Bernoulli responses.
  std::string weights_column;
  bool allow_overparameterized = false;
};

/// Everything compile produces and later stages need; immutable once built.
struct Prefit {
  std::string formula;
  FamilySpec family;
  ModelOptions options;
  std::string response;
  std::vector<std::string> parametric;  // variable names, excluding the intercept
  Eigen::VectorXd y;
  Eigen::VectorXd w;  // binomial trials, ones otherwise
  Eigen::MatrixXd X;
  std::vector<SmoothBlock> terms;
  int sp_count = 0;
  std::size_t rows_dropped = 0;

  Eigen::VectorXd b_init;
  Eigen::VectorXd se_init;
  Eigen::VectorXd lambda_init;
  Eigen::VectorXd param_prior_tau;  // one per parametric coefficient, intercept first
  double tau_init = 1;              // gaussian response precision start

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
  /// Intercept plus parametric terms; they occupy coefficients [0, parametric_count()).
  int parametric_count() const { return 1 + static_cast<int>(parametric.size()); }
  std::vector<int> parametric_idx() const;
  /// True when every smooth uses the independent-normal (diagonalized) prior.
  bool fully_diagonal() const;
};

struct InitReport {
  Eigen::VectorXd b_init;
  Eigen::VectorXd se_init;
  Eigen::VectorXd eta0;
  Eigen::VectorXd mu0;
  std::vector<std::string> notes;
};

/// Builds the design, penalties, transforms and initial values for `ast` on `data`.
Prefit assemble_design(const FormulaAst& ast, const DataTable& data, const FamilySpec& family,
                       const ModelOptions& options = {});

/// sum_j lambda_j S_j embedded at each term's coefficient offsets (p x p).
Eigen::MatrixXd total_penalty(const Prefit& prefit, const Eigen::VectorXd& lambda);

/// Horizontally packed penalty slab [S_1 | S_2 | ...] for one term.
Eigen::MatrixXd penalty_slab(const SmoothBlock& term);

/// One penalized IRLS step from the family's data-based starting mean, at prefit.lambda_init.
InitReport pirls_init(const Prefit& prefit);

/// tau_i = (10 (|b_i| + se_i))^-2 for each index in `parametric_idx`.
Eigen::VectorXd parametric_prior_precision(const Eigen::VectorXd& b_init, const Eigen::VectorXd& se_init,
                                           const std::vector<int>& parametric_idx);

/// A named array in the sampler's data dump. `values` are column-major.
struct NamedArray {
  std::string name;
  std::vector<double> values;
  std::vector<int> dims;  // empty: scalar; {n}: vector; {r, c}: matrix
  bool integer = false;
};

/// n, X, y, w (binomial), zero, then S1, S2, ... for non-diagonalized smooths.
std::vector<NamedArray> pack_sampler_data(const Prefit& prefit);

/// b, lambda (rho under the log-uniform prior), and tau for gaussian models.
std::vector<NamedArray> pack_initial_values(const Prefit& prefit);

NamedArray make_scalar(const std::string& name, double v, bool integer = false);
NamedArray make_vector(const std::string& name, const Eigen::VectorXd& v);
NamedArray make_matrix(const std::string& name, const Eigen::MatrixXd& m);

}  // namespace smoothforge
