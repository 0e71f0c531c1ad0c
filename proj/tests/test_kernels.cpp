#include <doctest.h>

#include <omp.h>

#include "smoothforge/kernels.hpp"
#include "smoothforge/rng.hpp"

using namespace smoothforge;
namespace k = smoothforge::kernels;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("serial kernels agree with dense algebra") {
  const auto X = random_matrix(70, 9, 1);
  const Eigen::VectorXd w = random_matrix(70, 1, 2).col(0).array().abs();
  const Eigen::VectorXd z = random_matrix(70, 1, 3).col(0);
  const Eigen::MatrixXd A = random_matrix(9, 9, 4);
  const Eigen::MatrixXd V = A * A.transpose();

  CHECK((k::serial::weighted_crossprod(X, w) - X.transpose() * w.asDiagonal() * X).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((k::serial::weighted_xty(X, w, z) - X.transpose() * w.asDiagonal() * z).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((k::serial::row_quadratic_forms(X, V) - (X * V * X.transpose()).diagonal()).cwiseAbs().maxCoeff() < 1e-10);

  const auto m = k::serial::draw_moments(X);
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd C = X.rowwise() - mean;
  CHECK((m.mean.transpose() - mean).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((m.covariance - C.transpose() * C / 69.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("draw moments with fewer than two draws") {
  const auto m = k::serial::draw_moments(random_matrix(1, 3, 5));
  CHECK(m.covariance.isZero());
  CHECK(k::parallel::draw_moments(random_matrix(1, 3, 5)).covariance.isZero());
}

TEST_CASE("parallel kernels are bitwise equal to the serial reference") {
  for (int threads : {1, 2, 4, 7}) {
    omp_set_num_threads(threads);
    for (auto [r, c] : {std::pair{1, 1}, std::pair{13, 5}, std::pair{400, 43}, std::pair{1000, 20}}) {
      const auto X = random_matrix(r, c, 10 + r);
      const Eigen::VectorXd w = random_matrix(r, 1, 20 + r).col(0).array().abs();
      const Eigen::VectorXd z = random_matrix(r, 1, 30 + r).col(0);
      const Eigen::MatrixXd A = random_matrix(c, c, 40 + c);
      const Eigen::MatrixXd V = A * A.transpose();
      CHECK(k::parallel::weighted_crossprod(X, w) == k::serial::weighted_crossprod(X, w));
      CHECK(k::parallel::weighted_xty(X, w, z) == k::serial::weighted_xty(X, w, z));
      CHECK(k::parallel::row_quadratic_forms(X, V) == k::serial::row_quadratic_forms(X, V));
      const auto ms = k::serial::draw_moments(X), mp = k::parallel::draw_moments(X);
      CHECK(ms.mean == mp.mean);
      CHECK(ms.covariance == mp.covariance);
    }
  }
}
