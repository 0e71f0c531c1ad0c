#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smoothforge/formula.hpp"

namespace smoothforge {

/// Relative eigenvalue threshold below which a penalty direction counts as unpenalized.
inline constexpr double kNullEigenTolerance = 1e-10;

/// What to do with prediction covariates outside the training range.
enum class RangePolicy { clamp, error };

/// Clamped cubic knot sequence: k + 4 knots, the end knots repeated 4 times.
struct KnotVector {
  int degree = 3;
  std::vector<double> knots;
  double lo = 0;
  double hi = 0;

  int basis_dim() const { return static_cast<int>(knots.size()) - degree - 1; }
};

struct PenaltyMatrix {
  Eigen::MatrixXd S;
  int rank = 0;
  std::string label;
};

/// Eigen-reparameterization of a single-penalty smooth: beta' = D U' beta.
struct Reparam {
  Eigen::MatrixXd U;  // eigenvectors, descending eigenvalue order
  Eigen::VectorXd D;  // sqrt of positive eigenvalues, then ones
  int penalized = 0;  // leading coefficients with unit prior precision
};

/// One smooth term's design block and prior structure.
struct SmoothBlock {
  std::string label;
  SmoothKind kind = SmoothKind::s;
  std::vector<std::string> variables;
  std::vector<KnotVector> margins;
  Eigen::MatrixXd X;
  /// Penalties from the basis construction (transformed along with X).
  std::vector<PenaltyMatrix> penalties;
  /// Extra penalty on the null space of sum(penalties); set by the assembler.
  std::optional<PenaltyMatrix> null_penalty;
  /// Dimension left unpenalized by sum(penalties).
  int null_dim = 0;
  /// Centering transform Z (raw_dim x raw_dim-1); empty before absorb_centering.
  Eigen::MatrixXd centering;
  std::optional<Reparam> reparam;
  int coef_offset = -1;
  int lambda_offset = -1;

  int raw_dim() const;
  int dim() const { return static_cast<int>(X.cols()); }
  bool centered() const { return centering.size() > 0; }
  /// penalties followed by null_penalty, i.e. one entry per smoothing parameter.
  std::vector<const PenaltyMatrix*> all_penalties() const;
  int lambda_count() const { return static_cast<int>(penalties.size()) + (null_penalty ? 1 : 0); }
  /// Maps raw basis columns to the block's current parameterization (Z U D^-1).
  Eigen::MatrixXd coefficient_transform() const;
};

/// Rank of a symmetric PSD matrix using the relative null-eigenvalue threshold.
int numerical_rank(const Eigen::MatrixXd& S);

KnotVector make_knots(std::span<const double> x, int k);

/// n x k cubic B-spline design; rows have at most 4 nonzeros and sum to one.
Eigen::MatrixXd bspline_design(std::span<const double> x, const KnotVector& kv, RangePolicy policy = RangePolicy::clamp);

/// D'D for the order-th difference matrix D.
PenaltyMatrix difference_penalty(int k, int order = 2);

SmoothBlock build_univariate_smooth(std::span<const double> x, int k, const std::string& label);
SmoothBlock build_tensor_smooth(std::span<const double> x1, std::span<const double> x2, int k1, int k2,
                                const std::string& label);

/// Reparameterizes so the block's fitted values sum to zero over the rows of X.
SmoothBlock absorb_centering(SmoothBlock block);

/// S0 = U0 U0' from the zero-eigenvalue eigenvectors of sum(penalties).
PenaltyMatrix null_space_penalty(const std::vector<PenaltyMatrix>& penalties);

/// Turns a single-penalty block's prior into independent normals.
/// Penalized coefficients come first and the M null-space ones last.
SmoothBlock diagonalize(SmoothBlock block);

/// Raw (pre-constraint) basis rows for new covariate values, one span per margin.
Eigen::MatrixXd raw_basis(const SmoothBlock& block, const std::vector<std::span<const double>>& x,
                          RangePolicy policy = RangePolicy::clamp);

/// Prediction design for the block: raw_basis times coefficient_transform.
Eigen::MatrixXd predict_block(const SmoothBlock& block, const std::vector<std::span<const double>>& x,
                              RangePolicy policy = RangePolicy::clamp);

}  // namespace smoothforge
