#include "smoothforge/prefit_io.hpp"

#include <json.hpp>

#include "smoothforge/error.hpp"
#include "smoothforge/table.hpp"

namespace smoothforge {

using nlohmann::json;

namespace {

json to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error(ErrorKind::user, "prefit matrix has " + std::to_string(data.size()) + " values for " +
                                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<double>();
  return m;
}

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json penalty_json(const PenaltyMatrix& p) { return {{"label", p.label}, {"rank", p.rank}, {"S", to_json(p.S)}}; }

PenaltyMatrix penalty_from(const json& j) {
  return {matrix_from(j.at("S")), j.at("rank").get<int>(), j.at("label").get<std::string>()};
}

json term_json(const SmoothBlock& t) {
  json margins = json::array();
  for (const auto& m : t.margins) {
    margins.push_back({{"degree", m.degree}, {"knots", m.knots}, {"lo", m.lo}, {"hi", m.hi}});
  }
  json j = {{"label", t.label},
            {"kind", t.kind == SmoothKind::s ? "s" : "te"},
            {"variables", t.variables},
            {"coef_offset", t.coef_offset},
            {"lambda_offset", t.lambda_offset},
            {"dim", t.dim()},
            {"null_dim", t.null_dim},
            {"margins", std::move(margins)},
            {"centering", to_json(t.centering)}};
  if (t.reparam) {
    // Diagonalized priors are identity blocks; store their index ranges only.
    j["reparam"] = {{"U", to_json(t.reparam->U)}, {"D", to_json(t.reparam->D)}, {"penalized", t.reparam->penalized}};
    j["prior_ranges"] = {{"penalized", {0, t.reparam->penalized}}, {"null", {t.reparam->penalized, t.null_dim}}};
  } else {
    json pens = json::array();
    for (const auto& p : t.penalties) pens.push_back(penalty_json(p));
    j["penalties"] = std::move(pens);
    j["null_penalty"] = t.null_penalty ? penalty_json(*t.null_penalty) : json(nullptr);
  }
  return j;
}

SmoothBlock term_from(const json& j, const Eigen::MatrixXd& X) {
  SmoothBlock t;
  t.label = j.at("label").get<std::string>();
  t.kind = j.at("kind").get<std::string>() == "s" ? SmoothKind::s : SmoothKind::te;
  t.variables = j.at("variables").get<std::vector<std::string>>();
  t.coef_offset = j.at("coef_offset").get<int>();
  t.lambda_offset = j.at("lambda_offset").get<int>();
  t.null_dim = j.at("null_dim").get<int>();
  const int dim = j.at("dim").get<int>();
  for (const auto& m : j.at("margins")) {
    KnotVector kv;
    kv.degree = m.at("degree").get<int>();
    kv.knots = m.at("knots").get<std::vector<double>>();
    kv.lo = m.at("lo").get<double>();
    kv.hi = m.at("hi").get<double>();
    t.margins.push_back(std::move(kv));
  }
  t.centering = matrix_from(j.at("centering"));
  if (t.coef_offset < 0 || t.coef_offset + dim > X.cols()) {
    throw Error(ErrorKind::user, "prefit term " + t.label + " lies outside the design matrix");
  }
  t.X = X.middleCols(t.coef_offset, dim);
  if (j.contains("reparam")) {
    const auto& r = j.at("reparam");
    t.reparam = Reparam{matrix_from(r.at("U")), vector_from(r.at("D")), r.at("penalized").get<int>()};
    const auto pen = j.at("prior_ranges").at("penalized").get<std::vector<int>>();
    const auto null = j.at("prior_ranges").at("null").get<std::vector<int>>();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
    d.segment(pen.at(0), pen.at(1)).setOnes();
    t.penalties.push_back({d.asDiagonal(), pen.at(1), t.label});
    if (null.at(1) > 0) {
      Eigen::VectorXd d0 = Eigen::VectorXd::Zero(dim);
      d0.segment(null.at(0), null.at(1)).setOnes();
      t.null_penalty = PenaltyMatrix{d0.asDiagonal(), null.at(1), "null"};
    }
  } else {
    for (const auto& p : j.at("penalties")) t.penalties.push_back(penalty_from(p));
    if (!j.at("null_penalty").is_null()) t.null_penalty = penalty_from(j.at("null_penalty"));
  }
  return t;
}

}  // namespace

std::string serialize_prefit(const Prefit& pf) {
  json terms = json::array();
  for (const auto& t : pf.terms) terms.push_back(term_json(t));
  json j = {
      {"format", kPrefitFormat},
      {"formula", pf.formula},
      {"family", family_name(pf.family.family)},
      {"link", link_name(pf.family.link)},
      {"options",
       {{"diagonalize", pf.options.diagonalize},
        {"sp_prior", pf.options.sp_prior == SmoothingPrior::gamma ? "gamma" : "log_uniform"},
        {"log_uniform_lo", pf.options.log_uniform_lo},
        {"log_uniform_hi", pf.options.log_uniform_hi},
        {"weights_column", pf.options.weights_column},
        {"allow_overparameterized", pf.options.allow_overparameterized}}},
      {"response", pf.response},
      {"parametric", pf.parametric},
      {"rows_dropped", pf.rows_dropped},
      {"n", pf.n()},
      {"p", pf.p()},
      {"sp_count", pf.sp_count},
      {"y", to_json(pf.y)},
      {"w", to_json(pf.w)},
      {"X", to_json(pf.X)},
      {"terms", std::move(terms)},
      {"b_init", to_json(pf.b_init)},
      {"se_init", to_json(pf.se_init)},
      {"lambda_init", to_json(pf.lambda_init)},
      {"param_prior_tau", to_json(pf.param_prior_tau)},
      {"tau_init", pf.tau_init},
  };
  return j.dump(1) + "\n";
}

Prefit deserialize_prefit(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::user, std::string("prefit file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kPrefitFormat) {
    throw Error(ErrorKind::user, "not a " + std::string(kPrefitFormat) + " file");
  }
  try {
    Prefit pf;
    pf.formula = j.at("formula").get<std::string>();
    pf.family = make_family(j.at("family").get<std::string>(), j.at("link").get<std::string>());
    const auto& o = j.at("options");
    pf.options.diagonalize = o.at("diagonalize").get<bool>();
    pf.options.sp_prior = o.at("sp_prior").get<std::string>() == "gamma" ? SmoothingPrior::gamma : SmoothingPrior::log_uniform;
    pf.options.log_uniform_lo = o.at("log_uniform_lo").get<double>();
    pf.options.log_uniform_hi = o.at("log_uniform_hi").get<double>();
    pf.options.weights_column = o.at("weights_column").get<std::string>();
    pf.options.allow_overparameterized = o.at("allow_overparameterized").get<bool>();
    pf.response = j.at("response").get<std::string>();
    pf.parametric = j.at("parametric").get<std::vector<std::string>>();
    pf.rows_dropped = j.at("rows_dropped").get<std::size_t>();
    pf.sp_count = j.at("sp_count").get<int>();
    pf.y = vector_from(j.at("y"));
    pf.w = vector_from(j.at("w"));
    pf.X = matrix_from(j.at("X"));
    for (const auto& t : j.at("terms")) pf.terms.push_back(term_from(t, pf.X));
    pf.b_init = vector_from(j.at("b_init"));
    pf.se_init = vector_from(j.at("se_init"));
    pf.lambda_init = vector_from(j.at("lambda_init"));
    pf.param_prior_tau = vector_from(j.at("param_prior_tau"));
    pf.tau_init = j.at("tau_init").get<double>();
    if (pf.X.rows() != pf.y.size() || pf.b_init.size() != pf.X.cols() || pf.lambda_init.size() != pf.sp_count) {
      throw Error(ErrorKind::user, "prefit arrays have inconsistent dimensions");
    }
    return pf;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::user, std::string("malformed prefit file: ") + e.what());
  }
}

void save_prefit(const Prefit& prefit, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_prefit(prefit));
}

Prefit load_prefit(const std::filesystem::path& path) { return deserialize_prefit(read_file(path)); }

}  // namespace smoothforge
