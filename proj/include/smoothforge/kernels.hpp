#pragma once

#include <Eigen/Dense>

// Data-parallel inner loops. Every kernel has a plain serial reference in
// `serial` and an OpenMP version in `parallel`; the library calls the
// parallel one. Each output entry is reduced in the same order by both, so
// results agree bitwise regardless of the thread count.
namespace smoothforge::kernels {

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // unbiased, (N-1) denominator; zero when N < 2
};

namespace serial {
Eigen::MatrixXd weighted_crossprod(const Eigen::MatrixXd& X, const Eigen::VectorXd& w);
Eigen::VectorXd weighted_xty(const Eigen::MatrixXd& X, const Eigen::VectorXd& w, const Eigen::VectorXd& z);
Eigen::VectorXd row_quadratic_forms(const Eigen::MatrixXd& X, const Eigen::MatrixXd& V);
Moments draw_moments(const Eigen::MatrixXd& draws);
}  // namespace serial

namespace parallel {
/// X' diag(w) X.
Eigen::MatrixXd weighted_crossprod(const Eigen::MatrixXd& X, const Eigen::VectorXd& w);
/// X' diag(w) z.
Eigen::VectorXd weighted_xty(const Eigen::MatrixXd& X, const Eigen::VectorXd& w, const Eigen::VectorXd& z);
/// diag(X V X'), i.e. x_i' V x_i per row.
Eigen::VectorXd row_quadratic_forms(const Eigen::MatrixXd& X, const Eigen::MatrixXd& V);
/// Column means and sample covariance of an N x p draw matrix (one draw per row).
Moments draw_moments(const Eigen::MatrixXd& draws);
}  // namespace parallel

using parallel::draw_moments;
using parallel::row_quadratic_forms;
using parallel::weighted_crossprod;
using parallel::weighted_xty;

}  // namespace smoothforge::kernels
