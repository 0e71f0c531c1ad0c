#include "smoothforge/basis.hpp"

#include <algorithm>
#include <cmath>

#include "smoothforge/error.hpp"

namespace smoothforge {

namespace {

/// Eigen-decomposition sorted by descending eigenvalue.
struct SortedEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

SortedEigen descending_eigen(const Eigen::MatrixXd& S) {
  const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::internal, "eigen-decomposition of a penalty failed");
  const Eigen::Index p = sym.rows();
  SortedEigen out{Eigen::VectorXd(p), Eigen::MatrixXd(p, p)};
  for (Eigen::Index j = 0; j < p; ++j) {
    out.values[j] = es.eigenvalues()[p - 1 - j];
    out.vectors.col(j) = es.eigenvectors().col(p - 1 - j);
  }
  return out;
}

int count_positive(const Eigen::VectorXd& descending) {
  if (descending.size() == 0) return 0;
  const double cut = kNullEigenTolerance * std::max(descending[0], 0.0);
  int r = 0;
  for (Eigen::Index j = 0; j < descending.size(); ++j)
    if (descending[j] > cut && descending[j] > 0) ++r;
  return r;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

/// Row-wise Kronecker product of two design matrices; the first margin varies slowest.
Eigen::MatrixXd row_kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows(), A.cols() * B.cols());
#pragma omp parallel for
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index a = 0; a < A.cols(); ++a)
      for (Eigen::Index b = 0; b < B.cols(); ++b) out(i, a * B.cols() + b) = A(i, a) * B(i, b);
  return out;
}

/// Nonzero cubic basis values at u for knot span `span` (Cox-de Boor, triangular form).
void basis_values(const std::vector<double>& U, int span, int degree, double u, double* N) {
  double left[8], right[8];
  N[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = u - U[span + 1 - j];
    right[j] = U[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
}

int find_span(const std::vector<double>& U, int degree, int last_basis, double u) {
  if (u >= U[last_basis + 1]) return last_basis;
  const auto first = U.begin() + degree;
  const auto end = U.begin() + last_basis + 1;
  const auto it = std::upper_bound(first, end, u);
  return static_cast<int>(it - U.begin()) - 1;
}

}  // namespace

int SmoothBlock::raw_dim() const {
  int d = 1;
  for (const auto& m : margins) d *= m.basis_dim();
  return d;
}

std::vector<const PenaltyMatrix*> SmoothBlock::all_penalties() const {
  std::vector<const PenaltyMatrix*> out;
  for (const auto& p : penalties) out.push_back(&p);
  if (null_penalty) out.push_back(&*null_penalty);
  return out;
}

Eigen::MatrixXd SmoothBlock::coefficient_transform() const {
  Eigen::MatrixXd T = centered() ? centering : Eigen::MatrixXd::Identity(raw_dim(), raw_dim());
  if (reparam) T = T * reparam->U * reparam->D.cwiseInverse().asDiagonal();
  return T;
}

int numerical_rank(const Eigen::MatrixXd& S) {
  if (S.size() == 0) return 0;
  return count_positive(descending_eigen(S).values);
}

KnotVector make_knots(std::span<const double> x, int k) {
  if (k < kMinBasisDim) throw Error(ErrorKind::user, "basis dimension k must be at least 4");
  std::vector<double> u(x.begin(), x.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  if (static_cast<int>(u.size()) < k) {
    throw Error(ErrorKind::user, "covariate has " + std::to_string(u.size()) + " distinct values, fewer than k = " +
                                     std::to_string(k));
  }
  KnotVector kv;
  kv.lo = u.front();
  kv.hi = u.back();
  const int interior = k - kv.degree - 1;
  kv.knots.assign(kv.degree + 1, kv.lo);
  const double m1 = static_cast<double>(u.size() - 1);
  for (int j = 1; j <= interior; ++j) {
    // Linear-interpolation quantile at probability j / (interior + 1).
    const double pos = m1 * j / (interior + 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    const double q = lo + 1 < u.size() ? u[lo] + frac * (u[lo + 1] - u[lo]) : u[lo];
    kv.knots.push_back(q);
  }
  kv.knots.insert(kv.knots.end(), kv.degree + 1, kv.hi);
  return kv;
}

Eigen::MatrixXd bspline_design(std::span<const double> x, const KnotVector& kv, RangePolicy policy) {
  const int k = kv.basis_dim();
  const auto n = static_cast<Eigen::Index>(x.size());
  if (policy == RangePolicy::error) {
    for (double v : x) {
      if (v < kv.lo || v > kv.hi) {
        throw Error(ErrorKind::user, "covariate value " + std::to_string(v) + " outside training range [" +
                                         std::to_string(kv.lo) + ", " + std::to_string(kv.hi) + "]");
      }
    }
  }
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, k);
#pragma omp parallel for
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = std::clamp(x[static_cast<std::size_t>(i)], kv.lo, kv.hi);
    const int span = find_span(kv.knots, kv.degree, k - 1, u);
    double N[8];
    basis_values(kv.knots, span, kv.degree, u, N);
    for (int r = 0; r <= kv.degree; ++r) B(i, span - kv.degree + r) = N[r];
  }
  return B;
}

PenaltyMatrix difference_penalty(int k, int order) {
  if (order < 1 || k <= order) {
    throw Error(ErrorKind::user, "difference penalty needs k > order (k = " + std::to_string(k) + ", order = " +
                                     std::to_string(order) + ")");
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(k, k);
  for (int d = 0; d < order; ++d) {
    const Eigen::MatrixXd prev = D;
    D.resize(prev.rows() - 1, k);
    for (Eigen::Index r = 0; r < D.rows(); ++r) D.row(r) = prev.row(r + 1) - prev.row(r);
  }
  return {D.transpose() * D, k - order, "difference" + std::to_string(order)};
}

SmoothBlock build_univariate_smooth(std::span<const double> x, int k, const std::string& label) {
  SmoothBlock block;
  block.label = label;
  block.kind = SmoothKind::s;
  block.margins.push_back(make_knots(x, k));
  block.X = bspline_design(x, block.margins[0]);
  auto S = difference_penalty(k, 2);
  S.label = label;
  block.penalties.push_back(std::move(S));
  block.null_dim = 2;
  return block;
}

SmoothBlock build_tensor_smooth(std::span<const double> x1, std::span<const double> x2, int k1, int k2,
                                const std::string& label) {
  if (x1.size() != x2.size()) throw Error(ErrorKind::internal, "tensor margins differ in length");
  SmoothBlock block;
  block.label = label;
  block.kind = SmoothKind::te;
  block.margins.push_back(make_knots(x1, k1));
  block.margins.push_back(make_knots(x2, k2));
  block.X = row_kron(bspline_design(x1, block.margins[0]), bspline_design(x2, block.margins[1]));
  const auto S1 = difference_penalty(k1, 2);
  const auto S2 = difference_penalty(k2, 2);
  block.penalties.push_back({kron(S1.S, Eigen::MatrixXd::Identity(k2, k2)), S1.rank * k2, label + ":margin1"});
  block.penalties.push_back({kron(Eigen::MatrixXd::Identity(k1, k1), S2.S), k1 * S2.rank, label + ":margin2"});
  block.null_dim = (k1 - S1.rank) * (k2 - S2.rank);
  return block;
}

SmoothBlock absorb_centering(SmoothBlock block) {
  if (block.centered()) throw Error(ErrorKind::internal, block.label + " is already centered");
  const Eigen::VectorXd c = block.X.colwise().sum().transpose();
  const double norm = c.norm();
  if (!(norm > 0) || norm <= 1e-12 * block.X.cwiseAbs().maxCoeff() * static_cast<double>(block.X.rows())) {
    throw Error(ErrorKind::internal, block.label + " has zero column sums; centering applied twice?");
  }
  // Householder reflection H with H c = -sign(c0) |c| e1; its trailing columns span null(c').
  Eigen::VectorXd v = c;
  v[0] += (c[0] >= 0 ? 1.0 : -1.0) * norm;
  const Eigen::Index p = c.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(p, p) - (2.0 / v.squaredNorm()) * v * v.transpose();
  block.centering = H.rightCols(p - 1);
  block.X = block.X * block.centering;
  for (auto& S : block.penalties) {
    S.S = block.centering.transpose() * S.S * block.centering;
    S.S = 0.5 * (S.S + S.S.transpose());
  }
  block.null_dim -= 1;
  return block;
}

PenaltyMatrix null_space_penalty(const std::vector<PenaltyMatrix>& penalties) {
  if (penalties.empty()) throw Error(ErrorKind::internal, "null_space_penalty needs at least one penalty");
  Eigen::MatrixXd total = penalties.front().S;
  for (std::size_t j = 1; j < penalties.size(); ++j) total += penalties[j].S;
  const auto eig = descending_eigen(total);
  const int r = count_positive(eig.values);
  const Eigen::Index p = total.rows();
  const Eigen::MatrixXd U0 = eig.vectors.rightCols(p - r);
  return {U0 * U0.transpose(), static_cast<int>(p - r), "null"};
}

SmoothBlock diagonalize(SmoothBlock block) {
  if (block.penalties.size() != 1 || block.null_penalty) {
    throw Error(ErrorKind::capability,
                block.label + " has " + std::to_string(block.lambda_count()) +
                    " penalties; only single-penalty smooths can be diagonalized");
  }
  if (block.reparam) throw Error(ErrorKind::internal, block.label + " is already diagonalized");
  const auto eig = descending_eigen(block.penalties[0].S);
  const int r = count_positive(eig.values);
  const Eigen::Index p = eig.values.size();
  Reparam rp;
  rp.U = eig.vectors;
  rp.D = Eigen::VectorXd::Ones(p);
  for (int j = 0; j < r; ++j) rp.D[j] = std::sqrt(eig.values[j]);
  rp.penalized = r;
  block.X = block.X * rp.U * rp.D.cwiseInverse().asDiagonal();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(p);
  diag.head(r).setOnes();
  block.penalties[0].S = diag.asDiagonal();
  block.penalties[0].rank = r;
  block.null_dim = static_cast<int>(p) - r;
  block.reparam = std::move(rp);
  return block;
}

Eigen::MatrixXd raw_basis(const SmoothBlock& block, const std::vector<std::span<const double>>& x,
                          RangePolicy policy) {
  if (x.size() != block.margins.size()) {
    throw Error(ErrorKind::internal, block.label + " expects " + std::to_string(block.margins.size()) + " covariates");
  }
  Eigen::MatrixXd B = bspline_design(x[0], block.margins[0], policy);
  if (block.margins.size() == 2) B = row_kron(B, bspline_design(x[1], block.margins[1], policy));
  return B;
}

Eigen::MatrixXd predict_block(const SmoothBlock& block, const std::vector<std::span<const double>>& x,
                              RangePolicy policy) {
  // Same multiplication order as construction so training rows reproduce X bit for bit.
  Eigen::MatrixXd B = raw_basis(block, x, policy);
  if (block.centered()) B = B * block.centering;
  if (block.reparam) B = B * block.reparam->U * block.reparam->D.cwiseInverse().asDiagonal();
  return B;
}

}  // namespace smoothforge
