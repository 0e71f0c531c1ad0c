#include <doctest.h>

#include <limits>

#include "oracles.hpp"
#include "smoothforge/dump.hpp"
#include "smoothforge/error.hpp"
#include "smoothforge/rng.hpp"

using namespace smoothforge;

TEST_CASE("dump syntax") {
  Eigen::MatrixXd M(2, 3);
  M << 1, 2, 3, 4, 5, 6;
  Eigen::VectorXd v(2);
  v << 0.5, 1.25;
  const std::string text = write_dump({make_scalar("n", 200, true), make_vector("y", v), make_matrix("X", M),
                                       make_scalar("tau", 0.1)});
  CHECK(text ==
        "\"n\" <- 200\n"
        "\"y\" <- c(0.5, 1.25)\n"
        "\"X\" <- structure(c(1, 4, 2, 5, 3, 6), .Dim = c(2, 3))\n"
        "\"tau\" <- 0.1\n");
}

TEST_CASE("dump round trip is exact") {
  Rng rng(8);
  Eigen::MatrixXd M(17, 5);
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, j) = rng.normal() * std::pow(10.0, static_cast<double>(i % 9) - 4);
  M(0, 0) = std::numeric_limits<double>::min();
  M(1, 0) = -std::numeric_limits<double>::max();
  M(2, 0) = 1e-300;
  M(3, 0) = 0.1 + 0.2;
  Eigen::VectorXd v = M.col(1);
  const std::string text = write_dump({make_matrix("X", M), make_vector("v", v), make_scalar("s", -2.5e-17)});
  const auto parsed = oracle::DumpParser(text).parse();
  REQUIRE(parsed.size() == 3);
  const auto& X = parsed.at("X");
  REQUIRE(X.dims == std::vector<long>{17, 5});
  for (Eigen::Index j = 0; j < 5; ++j)
    for (Eigen::Index i = 0; i < 17; ++i) CHECK(X.values[static_cast<std::size_t>(j * 17 + i)] == M(i, j));
  CHECK(parsed.at("v").values == std::vector<double>(v.data(), v.data() + v.size()));
  CHECK(parsed.at("s").values == std::vector<double>{-2.5e-17});
}

TEST_CASE("empty vector and non-finite values") {
  CHECK(write_dump({make_vector("e", Eigen::VectorXd(0))}) == "\"e\" <- c()\n");
  Eigen::VectorXd bad(2);
  bad << 1, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(write_dump({make_vector("bad", bad)}), Error);
}
