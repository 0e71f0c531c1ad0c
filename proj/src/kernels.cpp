#include "smoothforge/kernels.hpp"

namespace smoothforge::kernels {

namespace serial {

Eigen::MatrixXd weighted_crossprod(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
  const Eigen::Index n = X.rows(), p = X.cols();
  Eigen::MatrixXd out(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k <= j; ++k) {
      double acc = 0;
      for (Eigen::Index i = 0; i < n; ++i) acc += w[i] * X(i, j) * X(i, k);
      out(j, k) = out(k, j) = acc;
    }
  }
  return out;
}

Eigen::VectorXd weighted_xty(const Eigen::MatrixXd& X, const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
  Eigen::VectorXd out(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double acc = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) acc += w[i] * X(i, j) * z[i];
    out[j] = acc;
  }
  return out;
}

Eigen::VectorXd row_quadratic_forms(const Eigen::MatrixXd& X, const Eigen::MatrixXd& V) {
  const Eigen::Index p = X.cols();
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double acc = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      double t = 0;
      for (Eigen::Index k = 0; k < p; ++k) t += V(j, k) * X(i, k);
      acc += X(i, j) * t;
    }
    out[i] = acc;
  }
  return out;
}

Moments draw_moments(const Eigen::MatrixXd& draws) {
  const Eigen::Index N = draws.rows(), p = draws.cols();
  Moments m{Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p)};
  if (N == 0) return m;
  for (Eigen::Index j = 0; j < p; ++j) {
    double acc = 0;
    for (Eigen::Index i = 0; i < N; ++i) acc += draws(i, j);
    m.mean[j] = acc / static_cast<double>(N);
  }
  if (N < 2) return m;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k <= j; ++k) {
      double acc = 0;
      for (Eigen::Index i = 0; i < N; ++i) acc += (draws(i, j) - m.mean[j]) * (draws(i, k) - m.mean[k]);
      m.covariance(j, k) = m.covariance(k, j) = acc / static_cast<double>(N - 1);
    }
  }
  return m;
}

}  // namespace serial

namespace parallel {

Eigen::MatrixXd weighted_crossprod(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
  const Eigen::Index n = X.rows(), p = X.cols();
  Eigen::MatrixXd out(p, p);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < p; ++j) {
    const double* xj = X.col(j).data();
    for (Eigen::Index k = 0; k <= j; ++k) {
      const double* xk = X.col(k).data();
      double acc = 0;
      for (Eigen::Index i = 0; i < n; ++i) acc += w[i] * xj[i] * xk[i];
      out(j, k) = acc;
    }
  }
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = 0; k < j; ++k) out(k, j) = out(j, k);
  return out;
}

Eigen::VectorXd weighted_xty(const Eigen::MatrixXd& X, const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
  Eigen::VectorXd out(X.cols());
#pragma omp parallel for
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double* xj = X.col(j).data();
    double acc = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) acc += w[i] * xj[i] * z[i];
    out[j] = acc;
  }
  return out;
}

Eigen::VectorXd row_quadratic_forms(const Eigen::MatrixXd& X, const Eigen::MatrixXd& V) {
  const Eigen::Index p = X.cols();
  Eigen::VectorXd out(X.rows());
#pragma omp parallel
  {
    Eigen::VectorXd row(p);
#pragma omp for
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      for (Eigen::Index k = 0; k < p; ++k) row[k] = X(i, k);
      double acc = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        const double* vj = V.data() + j;  // row j of column-major V, stride p
        double t = 0;
        for (Eigen::Index k = 0; k < p; ++k) t += vj[k * V.rows()] * row[k];
        acc += row[j] * t;
      }
      out[i] = acc;
    }
  }
  return out;
}

Moments draw_moments(const Eigen::MatrixXd& draws) {
  const Eigen::Index N = draws.rows(), p = draws.cols();
  Moments m{Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p)};
  if (N == 0) return m;
#pragma omp parallel for
  for (Eigen::Index j = 0; j < p; ++j) {
    const double* dj = draws.col(j).data();
    double acc = 0;
    for (Eigen::Index i = 0; i < N; ++i) acc += dj[i];
    m.mean[j] = acc / static_cast<double>(N);
  }
  if (N < 2) return m;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < p; ++j) {
    const double* dj = draws.col(j).data();
    for (Eigen::Index k = 0; k <= j; ++k) {
      const double* dk = draws.col(k).data();
      double acc = 0;
      for (Eigen::Index i = 0; i < N; ++i) acc += (dj[i] - m.mean[j]) * (dk[i] - m.mean[k]);
      m.covariance(j, k) = acc / static_cast<double>(N - 1);
    }
  }
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = 0; k < j; ++k) m.covariance(k, j) = m.covariance(j, k);
  return m;
}

}  // namespace parallel

}  // namespace smoothforge::kernels
