#include "smoothforge/posterior.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "smoothforge/error.hpp"
#include "smoothforge/kernels.hpp"

namespace smoothforge {

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  return lo + 1 < v.size() ? v[lo] + frac * (v[lo + 1] - v[lo]) : v[lo];
}

EdfResult partial_traces(const Prefit& prefit, Eigen::VectorXd diag) {
  EdfResult r;
  r.total = diag.sum();
  for (const auto& t : prefit.terms) r.per_term.push_back(diag.segment(t.coef_offset, t.dim()).sum());
  r.diagonal = std::move(diag);
  return r;
}

std::vector<std::span<const double>> term_covariates(const SmoothBlock& t, const DataTable& data) {
  std::vector<std::span<const double>> x;
  for (const auto& v : t.variables) x.emplace_back(data.column(v));
  return x;
}

}  // namespace

Eigen::VectorXd irls_weights(const Prefit& prefit, const Eigen::VectorXd& mu) {
  Eigen::VectorXd W(prefit.n());
  for (Eigen::Index i = 0; i < W.size(); ++i) W[i] = prefit.family.irls_weight(mu[i], prefit.w[i]);
  return W;
}

EdfResult edf_penalty(const Prefit& prefit, const Eigen::VectorXd& lambda_bar, const Eigen::VectorXd& W) {
  for (Eigen::Index j = 0; j < lambda_bar.size(); ++j) {
    if (!(lambda_bar[j] > 0)) throw Error(ErrorKind::user, "smoothing parameters must be strictly positive");
  }
  const Eigen::MatrixXd XtWX = kernels::weighted_crossprod(prefit.X, W);
  const Eigen::MatrixXd A = XtWX + total_penalty(prefit, lambda_bar);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0).all()) {
    throw Error(ErrorKind::internal, "penalized information matrix is singular");
  }
  const Eigen::MatrixXd F = ldlt.solve(XtWX);
  return partial_traces(prefit, F.diagonal());
}

EdfResult edf_vbeta(const Prefit& prefit, const Eigen::MatrixXd& V_beta, const Eigen::VectorXd& W, double phi) {
  if (!(phi > 0)) throw Error(ErrorKind::user, "scale parameter must be positive");
  const Eigen::MatrixXd XtWX = kernels::weighted_crossprod(prefit.X, W);
  // diag(V XtWX) without forming the product.
  Eigen::VectorXd diag(prefit.p());
  for (Eigen::Index i = 0; i < diag.size(); ++i) diag[i] = V_beta.row(i).dot(XtWX.col(i)) / phi;
  return partial_traces(prefit, std::move(diag));
}

PosteriorSummary summarize_coefficients(const SampleStore& store, const Prefit& prefit) {
  const Eigen::MatrixXd b = store.node("b");
  if (b.cols() == 0) throw Error(ErrorKind::user, "samples do not contain the monitored node b");
  if (b.cols() != prefit.p()) {
    throw Error(ErrorKind::user, "samples have " + std::to_string(b.cols()) + " b columns but the prefit has " +
                                     std::to_string(prefit.p()) + " coefficients");
  }
  if (b.rows() == 0) throw Error(ErrorKind::user, "samples contain no draws");

  PosteriorSummary s;
  s.draws = static_cast<std::size_t>(b.rows());
  const auto m = kernels::draw_moments(b);
  s.b_hat = m.mean;
  s.V_beta = 0.5 * (m.covariance + m.covariance.transpose());

  const Eigen::MatrixXd rho = store.node("rho");
  if (rho.cols() != 0 && rho.cols() != prefit.sp_count) {
    throw Error(ErrorKind::user, "samples have " + std::to_string(rho.cols()) + " rho columns but the prefit has " +
                                     std::to_string(prefit.sp_count) + " smoothing parameters");
  }
  for (Eigen::Index j = 0; j < rho.cols(); ++j) {
    std::vector<double> v(rho.col(j).data(), rho.col(j).data() + rho.rows());
    RhoStats st;
    st.mean = rho.col(j).mean();
    st.sd = v.size() > 1 ? std::sqrt((rho.col(j).array() - st.mean).square().sum() / static_cast<double>(v.size() - 1)) : 0;
    st.q025 = quantile(v, 0.025);
    st.q50 = quantile(v, 0.5);
    st.q975 = quantile(v, 0.975);
    s.rho.push_back(st);
  }
  const Eigen::MatrixXd scale = store.node("scale");
  if (scale.cols() == 1) s.scale_hat = scale.col(0).mean();
  return s;
}

PosteriorSummary summarize(const SampleStore& store, const Prefit& prefit, EdfMethod method) {
  PosteriorSummary s = summarize_coefficients(store, prefit);
  s.edf_method = method;
  const Eigen::MatrixXd rho = store.node("rho");
  Eigen::VectorXd lambda_bar(rho.cols());
  for (Eigen::Index j = 0; j < rho.cols(); ++j) lambda_bar[j] = rho.col(j).array().exp().mean();

  const Eigen::MatrixXd mu_draws = store.node("mu");
  if (mu_draws.cols() != 0 && mu_draws.cols() != prefit.n()) {
    throw Error(ErrorKind::user, "samples have " + std::to_string(mu_draws.cols()) + " mu columns but the prefit has " +
                                     std::to_string(prefit.n()) + " rows");
  }
  const bool gaussian = prefit.family.family == Family::gaussian;
  Eigen::VectorXd mu;
  if (mu_draws.cols() > 0) mu = mu_draws.colwise().mean().transpose();

  EdfResult edf;
  if (method == EdfMethod::penalty) {
    if (prefit.sp_count > 0 && rho.cols() == 0) {
      throw Error(ErrorKind::user, "PENALTY effective degrees of freedom need the monitored node rho");
    }
    if (mu.size() == 0) mu = (prefit.X * s.b_hat).unaryExpr([&](double e) { return prefit.family.inverse_link(e); });
    edf = edf_penalty(prefit, lambda_bar, irls_weights(prefit, mu));
  } else {
    if (!gaussian && mu.size() == 0) {
      throw Error(ErrorKind::user, "VBETA effective degrees of freedom for a " +
                                       std::string(family_name(prefit.family.family)) +
                                       " model need the monitored node mu");
    }
    double phi = 1;
    if (prefit.family.has_scale()) {
      if (!s.scale_hat) throw Error(ErrorKind::user, "VBETA effective degrees of freedom need the monitored node scale");
      phi = *s.scale_hat;
    }
    if (gaussian) mu = prefit.X * s.b_hat;
    edf = edf_vbeta(prefit, s.V_beta, irls_weights(prefit, mu), phi);
  }
  s.edf_total = edf.total;
  s.edf_term = edf.per_term;
  return s;
}

Eigen::MatrixXd predict_lp_matrix(const Prefit& prefit, const DataTable& newdata, RangePolicy policy) {
  const auto n = static_cast<Eigen::Index>(newdata.rows());
  Eigen::MatrixXd Xp(n, prefit.p());
  Xp.col(0).setOnes();
  for (std::size_t j = 0; j < prefit.parametric.size(); ++j) {
    const auto& col = newdata.column(prefit.parametric[j]);
    Xp.col(static_cast<Eigen::Index>(j) + 1) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
  }
  for (const auto& t : prefit.terms) {
    Xp.middleCols(t.coef_offset, t.dim()) = predict_block(t, term_covariates(t, newdata), policy);
  }
  if (!Xp.allFinite()) throw Error(ErrorKind::user, "newdata contains missing values in model covariates");
  return Xp;
}

std::vector<int> thinned_draw_indices(std::size_t stored, int n_draws) {
  std::vector<int> idx;
  for (int j = 1; j <= n_draws; ++j) {
    idx.push_back(static_cast<int>(static_cast<std::size_t>(j) * stored / static_cast<std::size_t>(n_draws)));
  }
  return idx;
}

Prediction predict(const Prefit& prefit, const PosteriorSummary& summary, const SampleStore* store,
                   const DataTable& newdata, int n_draws, bool response_scale, RangePolicy policy) {
  const Eigen::MatrixXd Xp = predict_lp_matrix(prefit, newdata, policy);
  Prediction pr;
  pr.fit = Xp * summary.b_hat;
  pr.se = kernels::row_quadratic_forms(Xp, summary.V_beta).cwiseMax(0.0).cwiseSqrt();
  pr.lo = pr.fit - kBandMultiplier * pr.se;
  pr.hi = pr.fit + kBandMultiplier * pr.se;
  if (n_draws < 0) throw Error(ErrorKind::user, "number of draws must be non-negative");
  if (n_draws > 0) {
    const std::size_t stored = store ? store->draws() : 0;
    if (static_cast<std::size_t>(n_draws) > stored) {
      throw Error(ErrorKind::user, "requested " + std::to_string(n_draws) + " posterior curves but only " +
                                       std::to_string(stored) + " draws are stored");
    }
    const Eigen::MatrixXd b = store->node("b");
    if (b.cols() != prefit.p()) throw Error(ErrorKind::user, "samples do not match the prefit coefficient count");
    pr.draw_indices = thinned_draw_indices(stored, n_draws);
    pr.curves.resize(Xp.rows(), n_draws);
    for (int j = 0; j < n_draws; ++j) pr.curves.col(j) = Xp * b.row(pr.draw_indices[static_cast<std::size_t>(j)] - 1).transpose();
  }
  if (response_scale) {
    auto inv = [&](double e) { return prefit.family.inverse_link(e); };
    pr.fit = pr.fit.unaryExpr(inv);
    pr.lo = pr.lo.unaryExpr(inv);
    pr.hi = pr.hi.unaryExpr(inv);
    pr.curves = pr.curves.unaryExpr(inv);
  }
  return pr;
}

CsvTable plot_data(const Prefit& prefit, const PosteriorSummary& summary, const std::string& term_label,
                   int grid_size) {
  const auto it = std::find_if(prefit.terms.begin(), prefit.terms.end(),
                               [&](const SmoothBlock& t) { return t.label == term_label; });
  if (it == prefit.terms.end()) {
    std::string known;
    for (const auto& t : prefit.terms) known += (known.empty() ? "" : ", ") + t.label;
    throw Error(ErrorKind::user, "unknown term " + term_label + (known.empty() ? "" : " (model terms: " + known + ")"));
  }
  if (grid_size < 2) throw Error(ErrorKind::user, "grid size must be at least 2");
  const SmoothBlock& t = *it;
  auto grid = [&](const KnotVector& kv) {
    std::vector<double> g(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) g[static_cast<std::size_t>(i)] = kv.lo + (kv.hi - kv.lo) * i / (grid_size - 1);
    g.back() = kv.hi;
    return g;
  };
  CsvTable out;
  std::vector<std::vector<double>> cov(t.margins.size());
  if (t.margins.size() == 1) {
    cov[0] = grid(t.margins[0]);
  } else {
    const auto g1 = grid(t.margins[0]);
    const auto g2 = grid(t.margins[1]);
    for (double a : g1)
      for (double b : g2) {
        cov[0].push_back(a);
        cov[1].push_back(b);
      }
  }
  std::vector<std::span<const double>> spans(cov.begin(), cov.end());
  const Eigen::MatrixXd Xt = predict_block(t, spans, RangePolicy::clamp);
  const Eigen::VectorXd fit = Xt * summary.b_hat.segment(t.coef_offset, t.dim());
  const Eigen::VectorXd se =
      kernels::row_quadratic_forms(Xt, summary.V_beta.block(t.coef_offset, t.coef_offset, t.dim(), t.dim()))
          .cwiseMax(0.0)
          .cwiseSqrt();
  const auto rows = static_cast<Eigen::Index>(cov[0].size());
  const auto nc = static_cast<Eigen::Index>(cov.size());
  out.columns = t.variables;
  out.columns.insert(out.columns.end(), {"fit", "lo", "hi"});
  out.rows.resize(rows, nc + 3);
  for (Eigen::Index c = 0; c < nc; ++c) out.rows.col(c) = Eigen::Map<const Eigen::VectorXd>(cov[static_cast<std::size_t>(c)].data(), rows);
  out.rows.col(nc) = fit;
  out.rows.col(nc + 1) = fit - kBandMultiplier * se;
  out.rows.col(nc + 2) = fit + kBandMultiplier * se;
  return out;
}

CsvTable prediction_table(const Prefit& prefit, const DataTable& newdata, const Prediction& pred) {
  std::vector<std::string> vars = prefit.parametric;
  for (const auto& t : prefit.terms)
    for (const auto& v : t.variables)
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  CsvTable out;
  out.columns = vars;
  out.columns.insert(out.columns.end(), {"fit", "se", "lo", "hi"});
  for (Eigen::Index j = 0; j < pred.curves.cols(); ++j) out.columns.push_back("draw" + std::to_string(j + 1));
  const auto n = pred.fit.size();
  const auto nv = static_cast<Eigen::Index>(vars.size());
  out.rows.resize(n, static_cast<Eigen::Index>(out.columns.size()));
  for (Eigen::Index c = 0; c < nv; ++c) {
    out.rows.col(c) = Eigen::Map<const Eigen::VectorXd>(newdata.column(vars[static_cast<std::size_t>(c)]).data(), n);
  }
  out.rows.col(nv) = pred.fit;
  out.rows.col(nv + 1) = pred.se;
  out.rows.col(nv + 2) = pred.lo;
  out.rows.col(nv + 3) = pred.hi;
  if (pred.curves.cols() > 0) out.rows.rightCols(pred.curves.cols()) = pred.curves;
  return out;
}

std::string write_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + table.columns[c];
  out += '\n';
  for (Eigen::Index r = 0; r < table.rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.rows.cols(); ++c) {
      if (c) out += ',';
      out += format_double(table.rows(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string serialize_summary(const PosteriorSummary& s, const Prefit& prefit) {
  using nlohmann::json;
  json V = json::array();
  for (Eigen::Index i = 0; i < s.V_beta.rows(); ++i)
    for (Eigen::Index j = 0; j < s.V_beta.cols(); ++j) V.push_back(s.V_beta(i, j));
  json rho = json::array();
  for (const auto& r : s.rho) {
    rho.push_back({{"mean", r.mean}, {"sd", r.sd}, {"q2.5", r.q025}, {"q50", r.q50}, {"q97.5", r.q975}});
  }
  json terms = json::array();
  for (std::size_t t = 0; t < prefit.terms.size(); ++t) {
    terms.push_back({{"label", prefit.terms[t].label}, {"edf", s.edf_term.at(t)}});
  }
  json j = {{"format", kSummaryFormat},
            {"formula", prefit.formula},
            {"draws", s.draws},
            {"b_hat", std::vector<double>(s.b_hat.data(), s.b_hat.data() + s.b_hat.size())},
            {"V_beta", {{"rows", s.V_beta.rows()}, {"cols", s.V_beta.cols()}, {"data", std::move(V)}}},
            {"rho", std::move(rho)},
            {"scale_hat", s.scale_hat ? json(*s.scale_hat) : json(nullptr)},
            {"edf_method", s.edf_method == EdfMethod::penalty ? "penalty" : "vbeta"},
            {"edf_total", s.edf_total},
            {"edf_term", std::move(terms)}};
  return j.dump(1) + "\n";
}

}  // namespace smoothforge
