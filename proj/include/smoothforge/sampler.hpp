#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smoothforge/assemble.hpp"
#include "smoothforge/rng.hpp"

namespace smoothforge {

inline constexpr double kPriorShape = 0.05;
inline constexpr double kPriorRate = 0.005;

struct Monitors {
  bool b = true;
  bool rho = true;
  bool scale = true;
  bool mu = false;
};

struct SamplerSettings {
  int n_iter = 10000;
  int burn = 0;
  int thin = 10;
  int chains = 1;
  std::uint64_t seed = 1;
  Monitors monitors;
  /// Hold tau or lambda at these values instead of sampling them.
  std::optional<double> fixed_tau;
  std::optional<Eigen::VectorXd> fixed_lambda;
};

/// Posterior draws, pooled across chains in chain order.
/// Row r of `values` is chain `chain[r]` at sampler iteration `iter[r]`.
struct SampleStore {
  std::vector<std::string> columns;
  std::vector<int> chain;
  std::vector<int> iter;
  Eigen::MatrixXd values;
  int n_iter = 0;
  int burn = 0;
  int thin = 1;
  std::uint64_t seed = 0;

  std::size_t draws() const { return chain.size(); }
  /// Columns of node `name` ("b", "rho", "mu" or "scale"), in index order.
  std::vector<int> node_columns(const std::string& name) const;
  bool has_node(const std::string& name) const { return !node_columns(name).empty(); }
  /// Draws of node `name` as a draws x length matrix.
  Eigen::MatrixXd node(const std::string& name) const;
};

/// Stored draws per chain: floor((n_iter - burn) / thin); a trailing partial thinning interval is dropped.
int stored_draw_count(int n_iter, int burn, int thin);

/// Independent-normal prior groups of a diagonalized gaussian model.
struct PriorGroup {
  int start = 0;
  int size = 0;
  int lambda_index = 0;
};

/// Sufficient statistics and prior layout shared read-only by all chains.
struct ConjugateModel {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::MatrixXd XtX;
  Eigen::VectorXd Xty;
  Eigen::VectorXd fixed_precision;  // parametric coefficients
  std::vector<PriorGroup> groups;
  int sp_count = 0;
};

struct ChainState {
  Eigen::VectorXd b;
  Eigen::VectorXd lambda;
  double tau = 1;
  Rng rng;
};

/// Throws Error(capability) naming the first feature that breaks conjugacy.
ConjugateModel conjugate_model(const Prefit& prefit);

Eigen::VectorXd update_beta(ChainState& state, const ConjugateModel& model);
double update_tau(ChainState& state, const ConjugateModel& model);
double update_lambda(ChainState& state, const ConjugateModel& model, const PriorGroup& group);

/// Runs `settings.chains` independent chains (OpenMP-parallel, seeds seed + chain).
/// Each iteration updates b, then tau, then every lambda group.
SampleStore gibbs_run(const Prefit& prefit, const SamplerSettings& settings);

}  // namespace smoothforge
