#include "smoothforge/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smoothforge/error.hpp"
#include "smoothforge/kernels.hpp"

namespace smoothforge {

std::vector<int> Prefit::parametric_idx() const {
  std::vector<int> idx(static_cast<std::size_t>(parametric_count()));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

bool Prefit::fully_diagonal() const {
  return std::all_of(terms.begin(), terms.end(), [](const SmoothBlock& t) { return t.reparam.has_value(); });
}

namespace {

void check_response(const Eigen::VectorXd& y, const Eigen::VectorXd& w, const FamilySpec& family, bool has_weights) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y[i];
    switch (family.family) {
      case Family::gaussian: break;
      case Family::gamma:
        if (!(v > 0)) throw Error(ErrorKind::user, "gamma response must be strictly positive (row " + std::to_string(i + 1) + ")");
        break;
      case Family::poisson:
        if (v < 0) throw Error(ErrorKind::user, "poisson response must be non-negative (row " + std::to_string(i + 1) + ")");
        break;
      case Family::binomial:
        if (!has_weights && v != 0 && v != 1) {
          throw Error(ErrorKind::user, "binomial response must be 0/1 without a weights column (row " +
                                           std::to_string(i + 1) + " has " + std::to_string(v) + ")");
        }
        if (has_weights && (v < 0 || v > 1 || !(w[i] > 0))) {
          throw Error(ErrorKind::user, "binomial response must be a proportion with positive trials (row " +
                                           std::to_string(i + 1) + ")");
        }
        break;
    }
  }
}

SmoothBlock build_term(const SmoothSpec& spec, const DataTable& data, const ModelOptions& options) {
  SmoothBlock block;
  if (spec.kind == SmoothKind::s) {
    block = build_univariate_smooth(data.column(spec.variables[0]), spec.k[0], spec.label());
  } else {
    block = build_tensor_smooth(data.column(spec.variables[0]), data.column(spec.variables[1]), spec.k[0], spec.k[1],
                                spec.label());
  }
  block.variables = spec.variables;
  block = absorb_centering(std::move(block));
  if (options.diagonalize && block.penalties.size() == 1) {
    block = diagonalize(std::move(block));
    if (block.null_dim > 0) {
      const Eigen::Index p = block.dim();
      Eigen::VectorXd diag = Eigen::VectorXd::Zero(p);
      diag.tail(block.null_dim).setOnes();
      block.null_penalty = PenaltyMatrix{diag.asDiagonal(), block.null_dim, "null"};
    }
  } else if (block.null_dim > 0) {
    block.null_penalty = null_space_penalty(block.penalties);
    block.null_dim = block.null_penalty->rank;
  }
  return block;
}

}  // namespace

Prefit assemble_design(const FormulaAst& ast, const DataTable& data, const FamilySpec& family,
                       const ModelOptions& options) {
  // Resolve every column first so missing-variable errors name the variable.
  std::vector<std::size_t> used;
  auto use = [&](const std::string& name) { used.push_back(data.column_index(name)); };
  use(ast.response);
  for (const auto& v : ast.parametric) use(v);
  for (const auto& s : ast.smooths)
    for (const auto& v : s.variables) use(v);
  const bool has_weights = !options.weights_column.empty();
  if (has_weights) {
    if (family.family != Family::binomial) {
      throw Error(ErrorKind::user, "a weights column is only supported for the binomial family");
    }
    use(options.weights_column);
  }

  std::size_t dropped = 0;
  const DataTable clean = drop_missing(data, used, dropped);
  if (clean.rows() == 0) throw Error(ErrorKind::user, "no complete rows remain after dropping missing values");
  validate_against_data(ast, clean.names, clean.rows(), options.allow_overparameterized);

  Prefit pf;
  pf.formula = to_string(ast);
  pf.family = family;
  pf.options = options;
  pf.response = ast.response;
  pf.parametric = ast.parametric;
  pf.rows_dropped = dropped;

  const auto n = static_cast<Eigen::Index>(clean.rows());
  const auto& ycol = clean.column(ast.response);
  pf.y = Eigen::Map<const Eigen::VectorXd>(ycol.data(), n);
  pf.w = Eigen::VectorXd::Ones(n);
  if (has_weights) {
    const auto& wcol = clean.column(options.weights_column);
    pf.w = Eigen::Map<const Eigen::VectorXd>(wcol.data(), n);
  }
  check_response(pf.y, pf.w, family, has_weights);

  int p = pf.parametric_count();
  int sp = 0;
  for (const auto& spec : ast.smooths) {
    SmoothBlock block = build_term(spec, clean, options);
    block.coef_offset = p;
    block.lambda_offset = sp;
    p += block.dim();
    sp += block.lambda_count();
    pf.terms.push_back(std::move(block));
  }
  pf.sp_count = sp;

  pf.X.resize(n, p);
  pf.X.col(0).setOnes();
  for (std::size_t j = 0; j < ast.parametric.size(); ++j) {
    const auto& col = clean.column(ast.parametric[j]);
    pf.X.col(static_cast<Eigen::Index>(j) + 1) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
  }
  for (const auto& t : pf.terms) pf.X.middleCols(t.coef_offset, t.dim()) = t.X;

  pf.lambda_init = Eigen::VectorXd::Ones(sp);
  const InitReport init = pirls_init(pf);
  pf.b_init = init.b_init;
  pf.se_init = init.se_init;
  pf.param_prior_tau = parametric_prior_precision(init.b_init, init.se_init, pf.parametric_idx());
  if (family.family == Family::gaussian) {
    const double rss = (pf.y - pf.X * pf.b_init).squaredNorm();
    pf.tau_init = rss > 0 ? static_cast<double>(n) / rss : 1.0;
  }
  return pf;
}

Eigen::MatrixXd total_penalty(const Prefit& prefit, const Eigen::VectorXd& lambda) {
  if (lambda.size() != prefit.sp_count) {
    throw Error(ErrorKind::internal, "expected " + std::to_string(prefit.sp_count) + " smoothing parameters");
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(prefit.p(), prefit.p());
  for (const auto& t : prefit.terms) {
    int j = t.lambda_offset;
    for (const PenaltyMatrix* S : t.all_penalties()) {
      P.block(t.coef_offset, t.coef_offset, t.dim(), t.dim()) += lambda[j++] * S->S;
    }
  }
  return P;
}

Eigen::MatrixXd penalty_slab(const SmoothBlock& term) {
  const auto pens = term.all_penalties();
  Eigen::MatrixXd slab(term.dim(), term.dim() * static_cast<Eigen::Index>(pens.size()));
  for (std::size_t j = 0; j < pens.size(); ++j) slab.middleCols(static_cast<Eigen::Index>(j) * term.dim(), term.dim()) = pens[j]->S;
  return slab;
}

InitReport pirls_init(const Prefit& prefit) {
  const FamilySpec& fam = prefit.family;
  const auto n = prefit.n();
  InitReport r;
  r.mu0.resize(n);
  const double ybar = prefit.y.mean();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = prefit.y[i];
    switch (fam.family) {
      case Family::gaussian: r.mu0[i] = y; break;
      case Family::gamma:
      case Family::poisson: r.mu0[i] = std::max(y, ybar / 10) + 0.1; break;
      case Family::binomial: r.mu0[i] = (prefit.w[i] * y + 0.5) / (prefit.w[i] + 1); break;
    }
  }
  r.eta0 = r.mu0.unaryExpr([&](double m) { return fam.link_fn(m); });
  Eigen::VectorXd z(n), wt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = r.mu0[i];
    z[i] = r.eta0[i] + (prefit.y[i] - mu) * fam.link_derivative(mu);
    wt[i] = fam.irls_weight(mu, prefit.w[i]);
  }
  const Eigen::MatrixXd Q = kernels::weighted_crossprod(prefit.X, wt) + total_penalty(prefit, prefit.lambda_init);
  const Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::internal, "penalized normal equations are singular at initialization");
  }
  r.b_init = llt.solve(kernels::weighted_xty(prefit.X, wt, z));
  const Eigen::MatrixXd Qinv = llt.solve(Eigen::MatrixXd::Identity(prefit.p(), prefit.p()));
  r.se_init = Qinv.diagonal().cwiseMax(0.0).cwiseSqrt();
  if (!r.b_init.allFinite() || !r.se_init.allFinite()) {
    throw Error(ErrorKind::internal, "non-finite initial coefficients");
  }
  return r;
}

Eigen::VectorXd parametric_prior_precision(const Eigen::VectorXd& b_init, const Eigen::VectorXd& se_init,
                                           const std::vector<int>& parametric_idx) {
  Eigen::VectorXd tau(static_cast<Eigen::Index>(parametric_idx.size()));
  for (std::size_t j = 0; j < parametric_idx.size(); ++j) {
    const int i = parametric_idx[j];
    const double sd = 10.0 * (std::abs(b_init[i]) + se_init[i]);
    tau[static_cast<Eigen::Index>(j)] = 1.0 / (sd * sd);
  }
  return tau;
}

NamedArray make_scalar(const std::string& name, double v, bool integer) { return {name, {v}, {}, integer}; }

NamedArray make_vector(const std::string& name, const Eigen::VectorXd& v) {
  return {name, std::vector<double>(v.data(), v.data() + v.size()), {static_cast<int>(v.size())}, false};
}

NamedArray make_matrix(const std::string& name, const Eigen::MatrixXd& m) {
  // Eigen's default storage is column-major, which is the dump's element order.
  return {name, std::vector<double>(m.data(), m.data() + m.size()), {static_cast<int>(m.rows()), static_cast<int>(m.cols())},
          false};
}

std::vector<NamedArray> pack_sampler_data(const Prefit& prefit) {
  std::vector<NamedArray> out;
  out.push_back(make_scalar("n", prefit.n(), true));
  out.push_back(make_matrix("X", prefit.X));
  if (prefit.family.family == Family::binomial) {
    // dbin takes success counts out of w trials.
    out.push_back(make_vector("y", prefit.y.cwiseProduct(prefit.w).array().round().matrix()));
    out.push_back(make_vector("w", prefit.w));
  } else {
    out.push_back(make_vector("y", prefit.y));
  }
  out.push_back(make_vector("zero", Eigen::VectorXd::Zero(prefit.p())));
  int slab = 0;
  for (const auto& t : prefit.terms) {
    ++slab;
    if (t.reparam) continue;
    out.push_back(make_matrix("S" + std::to_string(slab), penalty_slab(t)));
  }
  return out;
}

std::vector<NamedArray> pack_initial_values(const Prefit& prefit) {
  std::vector<NamedArray> out;
  out.push_back(make_vector("b", prefit.b_init));
  if (prefit.sp_count > 0) {
    // Under the log-uniform prior lambda is a deterministic node; initialize rho instead.
    if (prefit.options.sp_prior == SmoothingPrior::log_uniform) {
      out.push_back(make_vector("rho", prefit.lambda_init.array().log().matrix()));
    } else {
      out.push_back(make_vector("lambda", prefit.lambda_init));
    }
  }
  if (prefit.family.family == Family::gaussian) out.push_back(make_scalar("tau", prefit.tau_init));
  return out;
}

}  // namespace smoothforge
