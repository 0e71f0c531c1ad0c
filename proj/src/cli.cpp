#include "smoothforge/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "smoothforge/assemble.hpp"
#include "smoothforge/codegen.hpp"
#include "smoothforge/dump.hpp"
#include "smoothforge/error.hpp"
#include "smoothforge/formula.hpp"
#include "smoothforge/posterior.hpp"
#include "smoothforge/prefit_io.hpp"
#include "smoothforge/samples_io.hpp"
#include "smoothforge/table.hpp"

namespace smoothforge {

namespace fs = std::filesystem;

namespace {

/// Parsed flags for every subcommand.
struct RunConfig {
  // compile
  std::string formula;
  std::string family = "gaussian";
  std::string link;
  std::string data;
  std::string weights;
  std::string out;
  std::string data_out;
  std::string inits_out;
  std::string prefit_out;
  bool diagonalize = false;
  std::string sp_prior = "gamma";
  double sp_lo = -12;
  double sp_hi = 12;
  bool allow_overparameterized = false;
  // sample
  std::string prefit;
  int n_iter = 10000;
  int burn = 0;
  int thin = 10;
  int chains = 1;
  std::optional<std::uint64_t> seed;
  bool monitor_mu = false;
  // summarize / predict / plotdata
  std::string samples;
  std::string edf_method = "penalty";
  std::string newdata;
  int draws = 0;
  bool response_scale = false;
  bool strict_range = false;
  std::string term;
  int grid = 100;
};

fs::path sibling(const std::string& model_path, const std::string& suffix) {
  fs::path p(model_path);
  return p.parent_path() / (p.stem().string() + suffix);
}

int cmd_compile(const RunConfig& c, std::ostream& out) {
  const FormulaAst ast = parse_formula(c.formula);
  const FamilySpec family = make_family(c.family, c.link);
  ModelOptions opt;
  opt.diagonalize = c.diagonalize;
  opt.sp_prior = c.sp_prior == "gamma" ? SmoothingPrior::gamma : SmoothingPrior::log_uniform;
  opt.log_uniform_lo = c.sp_lo;
  opt.log_uniform_hi = c.sp_hi;
  opt.weights_column = c.weights;
  opt.allow_overparameterized = c.allow_overparameterized;

  const DataTable data = read_csv(c.data);
  const Prefit pf = assemble_design(ast, data, family, opt);

  // Render everything before touching the filesystem.
  const std::string model = emit_model(pf, codegen_options(pf));
  const std::string dump = write_dump(pack_sampler_data(pf));
  const std::string inits = write_dump(pack_initial_values(pf));
  const std::string prefit = serialize_prefit(pf);

  const fs::path data_out = c.data_out.empty() ? sibling(c.out, ".data.dump") : fs::path(c.data_out);
  const fs::path inits_out = c.inits_out.empty() ? sibling(c.out, ".inits.dump") : fs::path(c.inits_out);
  const fs::path prefit_out = c.prefit_out.empty() ? sibling(c.out, ".prefit.json") : fs::path(c.prefit_out);
  write_file_atomic(c.out, model);
  write_file_atomic(data_out, dump);
  write_file_atomic(inits_out, inits);
  write_file_atomic(prefit_out, prefit);

  out << "formula: " << pf.formula << '\n'
      << "family: " << family_name(pf.family.family) << " (" << link_name(pf.family.link) << ")\n"
      << "rows used: " << pf.n() << '\n'
      << "rows dropped: " << pf.rows_dropped << '\n'
      << "coefficients: " << pf.p() << '\n'
      << "smoothing parameters: " << pf.sp_count << '\n'
      << "model: " << c.out << '\n'
      << "data: " << data_out.string() << '\n'
      << "inits: " << inits_out.string() << '\n'
      << "prefit: " << prefit_out.string() << '\n';
  return 0;
}

std::uint64_t resolve_seed(const RunConfig& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("SMOOTHFORGE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && *env != '\0') return v;
    throw Error(ErrorKind::user, "SMOOTHFORGE_SEED must be a non-negative integer");
  }
  return 1;
}

int cmd_sample(const RunConfig& c, std::ostream& out) {
  const Prefit pf = load_prefit(c.prefit);
  SamplerSettings s;
  s.n_iter = c.n_iter;
  s.burn = c.burn;
  s.thin = c.thin;
  s.chains = c.chains;
  s.seed = resolve_seed(c);
  s.monitors.mu = c.monitor_mu;
  const SampleStore store = gibbs_run(pf, s);
  write_file_atomic(c.out, write_samples_csv(store));
  out << "chains: " << s.chains << '\n'
      << "draws per chain: " << stored_draw_count(s.n_iter, s.burn, s.thin) << '\n'
      << "seed: " << s.seed << '\n'
      << "samples: " << c.out << '\n';
  return 0;
}

EdfMethod edf_method(const std::string& m) { return m == "vbeta" ? EdfMethod::vbeta : EdfMethod::penalty; }

int cmd_summarize(const RunConfig& c, std::ostream& out) {
  const Prefit pf = load_prefit(c.prefit);
  const SampleStore store = load_samples(c.samples);
  const PosteriorSummary s = summarize(store, pf, edf_method(c.edf_method));
  write_file_atomic(c.out, serialize_summary(s, pf));
  out << "draws: " << s.draws << '\n' << "edf total: " << s.edf_total << '\n';
  for (std::size_t t = 0; t < pf.terms.size(); ++t) out << "edf " << pf.terms[t].label << ": " << s.edf_term[t] << '\n';
  out << "summary: " << c.out << '\n';
  return 0;
}

int cmd_predict(const RunConfig& c, std::ostream& out) {
  const Prefit pf = load_prefit(c.prefit);
  const SampleStore store = load_samples(c.samples);
  const DataTable newdata = read_csv(c.newdata);
  const PosteriorSummary s = summarize_coefficients(store, pf);
  const Prediction pred = predict(pf, s, &store, newdata, c.draws, c.response_scale,
                                  c.strict_range ? RangePolicy::error : RangePolicy::clamp);
  write_file_atomic(c.out, write_csv(prediction_table(pf, newdata, pred)));
  out << "rows: " << newdata.rows() << '\n' << "predictions: " << c.out << '\n';
  return 0;
}

int cmd_plotdata(const RunConfig& c, std::ostream& out) {
  const Prefit pf = load_prefit(c.prefit);
  const SampleStore store = load_samples(c.samples);
  const PosteriorSummary s = summarize_coefficients(store, pf);
  const CsvTable table = plot_data(pf, s, c.term, c.grid);
  write_file_atomic(c.out, write_csv(table));
  out << "rows: " << table.rows.rows() << '\n' << "plot data: " << c.out << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"smoothforge: compile additive model formulas to Gibbs sampler code and summarize posterior draws"};
  app.require_subcommand(1);

  auto* compile = app.add_subcommand("compile", "Write model code, data dump, initial values and prefit");
  compile->add_option("--formula", c.formula, "Model formula, e.g. \"y ~ s(x0) + te(x1,x2)\"")->required();
  compile->add_option("--family", c.family, "gaussian | gamma | binomial | poisson")
      ->check(CLI::IsMember({"gaussian", "gamma", "binomial", "poisson"}, CLI::ignore_case));
  compile->add_option("--link", c.link, "identity | log | logit (default: the family's link)");
  compile->add_option("--data", c.data, "CSV file with a header row")->required();
  compile->add_option("--weights", c.weights, "Binomial trials column");
  compile->add_option("--out", c.out, "Model file to write")->required();
  compile->add_option("--data-out", c.data_out, "Data dump (default <out stem>.data.dump)");
  compile->add_option("--inits-out", c.inits_out, "Initial values dump (default <out stem>.inits.dump)");
  compile->add_option("--prefit-out", c.prefit_out, "Prefit file (default <out stem>.prefit.json)");
  compile->add_flag("--diagonalize", c.diagonalize, "Independent normal priors for single-penalty smooths");
  compile->add_option("--sp-prior", c.sp_prior, "gamma | logunif")
      ->check(CLI::IsMember({"gamma", "logunif"}));
  compile->add_option("--sp-lo", c.sp_lo, "Lower bound of the log-uniform rho prior");
  compile->add_option("--sp-hi", c.sp_hi, "Upper bound of the log-uniform rho prior");
  compile->add_flag("--allow-overparameterized", c.allow_overparameterized,
                    "Accept models with at least as many coefficients as rows");

  auto* sample = app.add_subcommand("sample", "Run the built-in conjugate Gibbs sampler");
  sample->add_option("--prefit", c.prefit)->required();
  sample->add_option("--out", c.out, "Samples CSV to write")->required();
  sample->add_option("--n-iter", c.n_iter)->check(CLI::NonNegativeNumber);
  sample->add_option("--burn", c.burn)->check(CLI::NonNegativeNumber);
  sample->add_option("--thin", c.thin)->check(CLI::PositiveNumber);
  sample->add_option("--chains", c.chains)->check(CLI::PositiveNumber);
  sample->add_option("--seed", c.seed, "Seed (fallback: SMOOTHFORGE_SEED, then 1)");
  sample->add_flag("--monitor-mu", c.monitor_mu, "Also store mu[1..n]");

  auto* summ = app.add_subcommand("summarize", "Posterior means, covariance and effective degrees of freedom");
  summ->add_option("--prefit", c.prefit)->required();
  summ->add_option("--samples", c.samples)->required();
  summ->add_option("--out", c.out)->required();
  summ->add_option("--edf-method", c.edf_method, "penalty | vbeta")->check(CLI::IsMember({"penalty", "vbeta"}));

  auto* pred = app.add_subcommand("predict", "Predictions with two-standard-error bands and posterior curves");
  pred->add_option("--prefit", c.prefit)->required();
  pred->add_option("--samples", c.samples)->required();
  pred->add_option("--newdata", c.newdata)->required();
  pred->add_option("--out", c.out)->required();
  pred->add_option("--draws", c.draws, "Number of posterior curves")->check(CLI::NonNegativeNumber);
  pred->add_flag("--response-scale", c.response_scale, "Apply the inverse link to fit, bands and curves");
  pred->add_flag("--strict-range", c.strict_range, "Reject covariates outside the training range");

  auto* plot = app.add_subcommand("plotdata", "Grid data for plotting one smooth term");
  plot->add_option("--prefit", c.prefit)->required();
  plot->add_option("--samples", c.samples)->required();
  plot->add_option("--term", c.term, "Term label, e.g. \"s(x0)\"")->required();
  plot->add_option("--grid", c.grid)->check(CLI::Range(2, 100000));
  plot->add_option("--out", c.out)->required();

  std::vector<std::string> storage{"smoothforge"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (compile->parsed()) return cmd_compile(c, out);
    if (sample->parsed()) return cmd_sample(c, out);
    if (summ->parsed()) return cmd_summarize(c, out);
    if (pred->parsed()) return cmd_predict(c, out);
    if (plot->parsed()) return cmd_plotdata(c, out);
  } catch (const FormulaError& e) {
    err << "error: " << e.what() << '\n';
    err << "  " << c.formula << '\n' << "  " << std::string(e.offset(), ' ') << "^\n";
    return exit_code(e.kind());
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace smoothforge
