#include "smoothforge/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "smoothforge/error.hpp"
#include "smoothforge/kernels.hpp"

namespace smoothforge {

std::vector<int> SampleStore::node_columns(const std::string& name) const {
  std::vector<std::pair<long, int>> found;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::string& col = columns[c];
    if (col == name) {
      found.emplace_back(1, static_cast<int>(c));
    } else if (col.size() > name.size() + 2 && col.compare(0, name.size(), name) == 0 && col[name.size()] == '[' &&
               col.back() == ']') {
      const std::string idx = col.substr(name.size() + 1, col.size() - name.size() - 2);
      char* end = nullptr;
      const long v = std::strtol(idx.c_str(), &end, 10);
      if (end && *end == '\0' && !idx.empty()) found.emplace_back(v, static_cast<int>(c));
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<int> out;
  for (const auto& f : found) out.push_back(f.second);
  return out;
}

Eigen::MatrixXd SampleStore::node(const std::string& name) const {
  const auto cols = node_columns(name);
  Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = values.col(cols[j]);
  return out;
}

int stored_draw_count(int n_iter, int burn, int thin) {
  if (thin <= 0 || n_iter <= burn) return 0;
  return (n_iter - burn) / thin;
}

ConjugateModel conjugate_model(const Prefit& prefit) {
  auto refuse = [](const std::string& why) {
    throw Error(ErrorKind::capability, "model not internally sampleable (" + why +
                                           "); use the emitted files with an external Gibbs sampler");
  };
  if (prefit.family.family != Family::gaussian || prefit.family.link != Link::identity) {
    refuse("family " + std::string(family_name(prefit.family.family)) + " with link " +
           std::string(link_name(prefit.family.link)) + " is not conjugate");
  }
  if (prefit.sp_count > 0 && prefit.options.sp_prior != SmoothingPrior::gamma) {
    refuse("log-uniform smoothing parameter prior is not conjugate");
  }
  for (const auto& t : prefit.terms) {
    if (!t.reparam) refuse(t.label + " uses a multivariate normal prior; compile with --diagonalize and single-penalty smooths");
  }
  ConjugateModel m;
  m.X = prefit.X;
  m.y = prefit.y;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(prefit.n());
  m.XtX = kernels::weighted_crossprod(prefit.X, ones);
  m.Xty = kernels::weighted_xty(prefit.X, ones, prefit.y);
  m.fixed_precision = prefit.param_prior_tau;
  m.sp_count = prefit.sp_count;
  for (const auto& t : prefit.terms) {
    m.groups.push_back({t.coef_offset, t.reparam->penalized, t.lambda_offset});
    if (t.null_penalty) m.groups.push_back({t.coef_offset + t.reparam->penalized, t.null_dim, t.lambda_offset + 1});
  }
  return m;
}

Eigen::VectorXd update_beta(ChainState& state, const ConjugateModel& model) {
  const Eigen::Index p = model.XtX.rows();
  Eigen::MatrixXd Q = state.tau * model.XtX;
  const Eigen::Index np = model.fixed_precision.size();
  for (Eigen::Index i = 0; i < np; ++i) Q(i, i) += model.fixed_precision[i];
  for (const auto& g : model.groups)
    for (int i = 0; i < g.size; ++i) Q(g.start + i, g.start + i) += state.lambda[g.lambda_index];
  const Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::internal, "posterior precision of b is not positive definite");
  }
  const Eigen::VectorXd mean = llt.solve(state.tau * model.Xty);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < p; ++i) z[i] = state.rng.normal();
  // Q = L L', so L'^{-1} z has covariance Q^{-1}.
  state.b = mean + llt.matrixU().solve(z);
  return state.b;
}

double update_tau(ChainState& state, const ConjugateModel& model) {
  const double rss = (model.y - model.X * state.b).squaredNorm();
  const double n = static_cast<double>(model.y.size());
  state.tau = state.rng.gamma(kPriorShape + n / 2.0, kPriorRate + rss / 2.0);
  return state.tau;
}

double update_lambda(ChainState& state, const ConjugateModel& model, const PriorGroup& group) {
  (void)model;
  const double ss = state.b.segment(group.start, group.size).squaredNorm();
  const double v = state.rng.gamma(kPriorShape + group.size / 2.0, kPriorRate + ss / 2.0);
  state.lambda[group.lambda_index] = v;
  return v;
}

namespace {

std::vector<std::string> monitored_columns(const Prefit& prefit, const Monitors& mon) {
  std::vector<std::string> cols;
  if (mon.b)
    for (int i = 1; i <= prefit.p(); ++i) cols.push_back("b[" + std::to_string(i) + "]");
  if (mon.rho)
    for (int i = 1; i <= prefit.sp_count; ++i) cols.push_back("rho[" + std::to_string(i) + "]");
  if (mon.scale) cols.push_back("scale");
  if (mon.mu)
    for (int i = 1; i <= prefit.n(); ++i) cols.push_back("mu[" + std::to_string(i) + "]");
  return cols;
}

Eigen::MatrixXd run_chain(const ConjugateModel& model, const Prefit& prefit, const SamplerSettings& s, int chain,
                          Eigen::Index width) {
  ChainState state{prefit.b_init, prefit.lambda_init, prefit.tau_init, Rng(s.seed + static_cast<std::uint64_t>(chain))};
  if (s.fixed_tau) state.tau = *s.fixed_tau;
  if (s.fixed_lambda) state.lambda = *s.fixed_lambda;
  const int stored = stored_draw_count(s.n_iter, s.burn, s.thin);
  Eigen::MatrixXd out(stored, width);
  int row = 0;
  for (int t = 1; t <= s.n_iter && row < stored; ++t) {
    update_beta(state, model);
    if (!s.fixed_tau) update_tau(state, model);
    if (!s.fixed_lambda)
      for (const auto& g : model.groups) update_lambda(state, model, g);
    if (t <= s.burn || (t - s.burn) % s.thin != 0) continue;
    Eigen::Index c = 0;
    if (s.monitors.b) {
      out.row(row).segment(c, state.b.size()) = state.b.transpose();
      c += state.b.size();
    }
    if (s.monitors.rho) {
      out.row(row).segment(c, state.lambda.size()) = state.lambda.array().log().matrix().transpose();
      c += state.lambda.size();
    }
    if (s.monitors.scale) out(row, c++) = 1.0 / state.tau;
    if (s.monitors.mu) out.row(row).segment(c, model.X.rows()) = (model.X * state.b).transpose();
    ++row;
  }
  return out;
}

}  // namespace

SampleStore gibbs_run(const Prefit& prefit, const SamplerSettings& s) {
  if (s.n_iter < 0 || s.burn < 0 || s.thin <= 0 || s.chains <= 0) {
    throw Error(ErrorKind::user, "sampler schedule must have n_iter >= 0, burn >= 0, thin > 0, chains > 0");
  }
  if (s.fixed_lambda && s.fixed_lambda->size() != prefit.sp_count) {
    throw Error(ErrorKind::user, "fixed lambda has the wrong length");
  }
  const ConjugateModel model = conjugate_model(prefit);

  SampleStore store;
  store.columns = monitored_columns(prefit, s.monitors);
  store.n_iter = s.n_iter;
  store.burn = s.burn;
  store.thin = s.thin;
  store.seed = s.seed;
  const auto width = static_cast<Eigen::Index>(store.columns.size());
  const int per_chain = stored_draw_count(s.n_iter, s.burn, s.thin);

  std::vector<Eigen::MatrixXd> chains(static_cast<std::size_t>(s.chains));
  std::vector<std::string> failures(static_cast<std::size_t>(s.chains));
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < s.chains; ++c) {
    try {
      chains[static_cast<std::size_t>(c)] = run_chain(model, prefit, s, c, width);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(c)] = e.what();
    }
  }
  for (const auto& f : failures)
    if (!f.empty()) throw Error(ErrorKind::internal, f);

  store.values.resize(static_cast<Eigen::Index>(per_chain) * s.chains, width);
  for (int c = 0; c < s.chains; ++c) {
    store.values.middleRows(static_cast<Eigen::Index>(c) * per_chain, per_chain) = chains[static_cast<std::size_t>(c)];
    for (int r = 0; r < per_chain; ++r) {
      store.chain.push_back(c + 1);
      store.iter.push_back(s.burn + (r + 1) * s.thin);
    }
  }
  return store;
}

}  // namespace smoothforge
