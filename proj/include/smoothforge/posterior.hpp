#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "smoothforge/assemble.hpp"
#include "smoothforge/sampler.hpp"
#include "smoothforge/table.hpp"

namespace smoothforge {

enum class EdfMethod { penalty, vbeta };

inline constexpr std::string_view kSummaryFormat = "smoothforge-summary-v1";

/// Band half-width in standard errors.
inline constexpr double kBandMultiplier = 2.0;

struct RhoStats {
  double mean = 0;
  double sd = 0;
  double q025 = 0;
  double q50 = 0;
  double q975 = 0;
};

struct EdfResult {
  double total = 0;
  std::vector<double> per_term;
  /// Diagonal of F; total and per_term are partial sums of it.
  Eigen::VectorXd diagonal;
};

struct PosteriorSummary {
  Eigen::VectorXd b_hat;
  Eigen::MatrixXd V_beta;
  std::vector<RhoStats> rho;
  std::optional<double> scale_hat;
  double edf_total = 0;
  std::vector<double> edf_term;
  EdfMethod edf_method = EdfMethod::penalty;
  std::size_t draws = 0;
};

/// IRLS weights at mean mu (prior weights only for gaussian/identity).
Eigen::VectorXd irls_weights(const Prefit& prefit, const Eigen::VectorXd& mu);

/// tr((X'WX + sum lambda_j S_j)^-1 X'WX) and per-term partial traces.
EdfResult edf_penalty(const Prefit& prefit, const Eigen::VectorXd& lambda_bar, const Eigen::VectorXd& W);

/// Partial traces of V_beta X'WX / phi.
EdfResult edf_vbeta(const Prefit& prefit, const Eigen::MatrixXd& V_beta, const Eigen::VectorXd& W, double phi);

/// b_hat, V_beta, rho statistics and scale only; EDF fields are left empty.
PosteriorSummary summarize_coefficients(const SampleStore& store, const Prefit& prefit);

/// Full summary including effective degrees of freedom by `method`.
PosteriorSummary summarize(const SampleStore& store, const Prefit& prefit, EdfMethod method);

/// Linear predictor matrix for new covariate values: Xp b is eta for any coefficient draw b.
Eigen::MatrixXd predict_lp_matrix(const Prefit& prefit, const DataTable& newdata,
                                  RangePolicy policy = RangePolicy::clamp);

struct Prediction {
  Eigen::VectorXd fit;
  Eigen::VectorXd se;  // always on the link scale
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  Eigen::MatrixXd curves;         // n_new x n_draws
  std::vector<int> draw_indices;  // 1-based rows of the pooled store
};

/// fit = Xp b_hat, se = sqrt(diag(Xp V Xp')), bands fit +- 2 se, plus `n_draws`
/// posterior curves from evenly spaced stored draws. With `response_scale`,
/// fit, bands and curves go through the inverse link.
Prediction predict(const Prefit& prefit, const PosteriorSummary& summary, const SampleStore* store,
                   const DataTable& newdata, int n_draws, bool response_scale,
                   RangePolicy policy = RangePolicy::clamp);

/// 1-based rows j * N / n_draws for j = 1..n_draws.
std::vector<int> thinned_draw_indices(std::size_t stored, int n_draws);

struct CsvTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd rows;
};

/// Centered smooth with +-2 se band on a grid over the training range
/// (grid_size points, or a grid_size x grid_size lattice for te terms).
CsvTable plot_data(const Prefit& prefit, const PosteriorSummary& summary, const std::string& term_label,
                   int grid_size);

/// Newdata covariates used by the model, then fit, se, lo, hi, draw1..drawN.
CsvTable prediction_table(const Prefit& prefit, const DataTable& newdata, const Prediction& pred);

std::string write_csv(const CsvTable& table);

std::string serialize_summary(const PosteriorSummary& summary, const Prefit& prefit);

}  // namespace smoothforge
