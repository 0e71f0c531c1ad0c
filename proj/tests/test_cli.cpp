#include <doctest.h>

#include <cstdlib>

#include "checks.hpp"
#include "smoothforge/prefit_io.hpp"
#include "smoothforge/samples_io.hpp"
#include "smoothforge/table.hpp"

using checks::cli;
using checks::slurp;

namespace {

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("compile writes four artifacts and reports") {
  checks::TempDir dir("cli");
  checks::write_frame(testdata::gamma_frame(), dir.file("dat.csv"));
  std::ostringstream out, err;
  const int code = smoothforge::run_cli({"compile", "--formula", "y ~ s(x0) + te(x1,x2) + s(x3)", "--family", "gamma",
                                         "--link", "log", "--data", dir.file("dat.csv"), "--out", dir.file("test.jags")},
                                        out, err);
  REQUIRE(code == 0);
  CHECK(golden::normalize(slurp(dir.file("test.jags"))) == golden::normalize(golden::read("gamma_listing.jags")));
  for (const char* f : {"test.data.dump", "test.inits.dump", "test.prefit.json"}) CHECK(std::filesystem::exists(dir.file(f)));
  CHECK(out.str().find("400") != std::string::npos);
  CHECK(out.str().find("43") != std::string::npos);
  const auto inits = oracle::DumpParser(slurp(dir.file("test.inits.dump"))).parse();
  CHECK(inits.at("b").values.size() == 43);
  CHECK(inits.at("lambda").values.size() == 7);
  // Emission-only flags are accepted for models the internal sampler cannot run.
  CHECK(cli({"compile", "--formula", "y ~ s(x0)", "--family", "gamma", "--diagonalize", "--data", dir.file("dat.csv"),
             "--out", dir.file("diag.jags")}) == 0);
  CHECK(slurp(dir.file("diag.jags")).find("b[i] ~ dnorm(0, lambda[1])") != std::string::npos);
  // Explicit output paths.
  CHECK(cli({"compile", "--formula", "y ~ s(x0)", "--family", "gamma", "--data", dir.file("dat.csv"), "--out",
             dir.file("m.jags"), "--data-out", dir.file("d.txt"), "--inits-out", dir.file("i.txt"), "--prefit-out",
             dir.file("p.json")}) == 0);
  CHECK(std::filesystem::exists(dir.file("d.txt")));
  CHECK(std::filesystem::exists(dir.file("p.json")));
}

TEST_CASE("usage, formula, data and I/O errors") {
  checks::TempDir dir("cli");
  checks::write_frame(testdata::sine_frame(), dir.file("d.csv"));
  CHECK(cli({"compile", "--formula", "y ~ s(x)", "--out", dir.file("m.jags")}) == 2);
  CHECK(cli({"frobnicate"}) == 2);
  CHECK(cli({}) == 2);
  std::string err;
  CHECK(cli({"compile", "--formula", "y ~ s(x, k=3)", "--data", dir.file("d.csv"), "--out", dir.file("m.jags")}, &err) == 2);
  CHECK(err.find("k must be at least 4") != std::string::npos);
  CHECK(err.find("\n             ^\n") != std::string::npos);
  CHECK(cli({"compile", "--formula", "y ~ s(z)", "--data", dir.file("d.csv"), "--out", dir.file("m.jags")}, &err) == 2);
  CHECK(err.find("variable z not found") != std::string::npos);
  CHECK(cli({"compile", "--formula", "y ~ s(x)", "--family", "gamma", "--link", "logit", "--data", dir.file("d.csv"),
             "--out", dir.file("m.jags")}) == 2);
  CHECK(cli({"compile", "--formula", "y ~ s(x)", "--data", dir.file("nope.csv"), "--out", dir.file("m.jags")}) == 3);
  // Nothing is written when compile fails.
  CHECK_FALSE(std::filesystem::exists(dir.file("m.jags")));
  CHECK_FALSE(std::filesystem::exists(dir.file("m.data.dump")));
  CHECK(cli({"compile", "--formula", "y ~ s(x)", "--data", dir.file("d.csv"), "--out",
             dir.file("missing_dir/m.jags")}) == 3);
  // Overparameterized models need an explicit override.
  checks::write_frame(testdata::sine_frame(15), dir.file("small.csv"));
  CHECK(cli({"compile", "--formula", "y ~ s(x, k=20)", "--data", dir.file("small.csv"), "--out", dir.file("o.jags")}, &err) == 2);
  CHECK(err.find("20 coefficients for 15 rows") != std::string::npos);
}

TEST_CASE("sample, summarize, predict and plotdata") {
  checks::TempDir dir("cli");
  checks::write_frame(testdata::sitka_frame(), dir.file("sitka.csv"));
  REQUIRE(cli({"compile", "--formula", "log.size ~ s(days) + ozone", "--data", dir.file("sitka.csv"), "--diagonalize",
               "--out", dir.file("sitka.jags")}) == 0);
  const std::string prefit = dir.file("sitka.prefit.json");
  REQUIRE(cli({"sample", "--prefit", prefit, "--seed", "1", "--out", dir.file("s.csv")}) == 0);
  const std::string samples = slurp(dir.file("s.csv"));
  CHECK(line_count(samples) == 1001);
  CHECK(samples.rfind("chain,iter,b[1],b[2],", 0) == 0);
  CHECK(samples.find(",rho[1],rho[2],scale\n") != std::string::npos);

  REQUIRE(cli({"sample", "--prefit", prefit, "--seed", "1", "--n-iter", "1000", "--chains", "3", "--monitor-mu", "--out",
               dir.file("mu.csv")}) == 0);
  const auto mu = smoothforge::load_samples(dir.file("mu.csv"));
  CHECK(mu.draws() == 300);
  CHECK(mu.node("mu").cols() == 79 * 13);

  REQUIRE(cli({"summarize", "--prefit", prefit, "--samples", dir.file("s.csv"), "--out", dir.file("sum.json")}) == 0);
  CHECK(slurp(dir.file("sum.json")).find("smoothforge-summary-v1") != std::string::npos);
  REQUIRE(cli({"summarize", "--prefit", prefit, "--samples", dir.file("s.csv"), "--edf-method", "vbeta", "--out",
               dir.file("sum2.json")}) == 0);
  CHECK(slurp(dir.file("sum2.json")).find("\"vbeta\"") != std::string::npos);

  std::vector<double> days, ozone;
  for (int d = 150; d <= 680; d += 10) {
    days.push_back(d);
    ozone.push_back(1);
  }
  checks::write_frame(testdata::frame({"days", "ozone"}, {days, ozone}), dir.file("new.csv"));
  REQUIRE(cli({"predict", "--prefit", prefit, "--samples", dir.file("s.csv"), "--newdata", dir.file("new.csv"), "--draws",
               "25", "--out", dir.file("pred.csv")}) == 0);
  const std::string pred = slurp(dir.file("pred.csv"));
  CHECK(line_count(pred) == days.size() + 1);
  CHECK(pred.rfind("ozone,days,fit,se,lo,hi,draw1,", 0) == 0);
  CHECK(cli({"predict", "--prefit", prefit, "--samples", dir.file("s.csv"), "--newdata", dir.file("new.csv"), "--draws",
             "1001", "--out", dir.file("p2.csv")}) == 2);

  REQUIRE(cli({"plotdata", "--prefit", prefit, "--samples", dir.file("s.csv"), "--term", "s(days)", "--grid", "50",
               "--out", dir.file("plot.csv")}) == 0);
  const std::string plot = slurp(dir.file("plot.csv"));
  CHECK(line_count(plot) == 51);
  CHECK(plot.rfind("days,fit,lo,hi\n", 0) == 0);
  std::string err;
  CHECK(cli({"plotdata", "--prefit", prefit, "--samples", dir.file("s.csv"), "--term", "s(x)", "--out",
             dir.file("bad.csv")}, &err) == 2);
  CHECK(err.find("s(days)") != std::string::npos);
}

TEST_CASE("non-conjugate models are refused with guidance") {
  checks::TempDir dir("cli");
  checks::write_frame(testdata::gamma_frame(), dir.file("g.csv"));
  REQUIRE(cli({"compile", "--formula", "y ~ s(x0)", "--family", "gamma", "--data", dir.file("g.csv"), "--out",
               dir.file("g.jags")}) == 0);
  std::string err;
  CHECK(cli({"sample", "--prefit", dir.file("g.prefit.json"), "--out", dir.file("s.csv")}, &err) == 4);
  CHECK(err.find("model not internally sampleable") != std::string::npos);
  CHECK(err.find("use the emitted files with an external Gibbs sampler") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir.file("s.csv")));
}

TEST_CASE("externally produced samples") {
  checks::TempDir dir("cli");
  checks::write_frame(testdata::sine_frame(), dir.file("d.csv"));
  REQUIRE(cli({"compile", "--formula", "y ~ s(x, k=5)", "--data", dir.file("d.csv"), "--out", dir.file("m.jags")}) == 0);
  const auto pf = smoothforge::load_prefit(dir.file("m.prefit.json"));
  // A chain export with no chain/iter columns and the nodes in arbitrary order.
  std::string text = "rho[2],rho[1]";
  for (int i = pf.p(); i >= 1; --i) text += ",b[" + std::to_string(i) + "]";
  text += "\n";
  smoothforge::Rng rng(4);
  for (int r = 0; r < 50; ++r) {
    text += smoothforge::format_double(rng.normal()) + "," + smoothforge::format_double(rng.normal());
    for (int i = pf.p() - 1; i >= 0; --i) text += "," + smoothforge::format_double(pf.b_init[i] + 0.01 * rng.normal());
    text += "\n";
  }
  std::ofstream(dir.file("ext.csv")) << text;
  CHECK(cli({"summarize", "--prefit", dir.file("m.prefit.json"), "--samples", dir.file("ext.csv"), "--out",
             dir.file("sum.json")}) == 0);
  std::ofstream(dir.file("short.csv")) << "b[1],b[2]\n1,2\n";
  std::string err;
  CHECK(cli({"summarize", "--prefit", dir.file("m.prefit.json"), "--samples", dir.file("short.csv"), "--out",
             dir.file("s2.json")}, &err) == 2);
  CHECK(err.find("2 b columns") != std::string::npos);
}

TEST_CASE("seed fallback and determinism") {
  const auto r = checks::determinism();
  CHECK_MESSAGE(r.ok, r.detail);

  checks::TempDir dir("cli");
  checks::write_frame(testdata::sine_frame(), dir.file("d.csv"));
  REQUIRE(cli({"compile", "--formula", "y ~ s(x)", "--diagonalize", "--data", dir.file("d.csv"), "--out",
               dir.file("m.jags")}) == 0);
  const std::string prefit = dir.file("m.prefit.json");
  const std::vector<std::string> base{"sample", "--prefit", prefit, "--n-iter", "200"};
  auto run = [&](std::vector<std::string> extra, const std::string& out) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    args.insert(args.end(), {"--out", dir.file(out)});
    REQUIRE(cli(args) == 0);
    return slurp(dir.file(out));
  };
  const auto seed9 = run({"--seed", "9"}, "a.csv");
  ::setenv("SMOOTHFORGE_SEED", "9", 1);
  const auto env9 = run({}, "b.csv");
  ::unsetenv("SMOOTHFORGE_SEED");
  const auto default_seed = run({}, "c.csv");
  CHECK(seed9 == env9);
  CHECK(default_seed == run({"--seed", "1"}, "d.csv"));
  CHECK(default_seed != seed9);
}

TEST_CASE("the installed binary reports exit codes") {
  const std::string exe = SMOOTHFORGE_CLI;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status(exe + " --help") == 0);
  CHECK(status(exe + " compile --formula 'y ~ s(x)'") == 2);
  CHECK(status(exe + " compile --formula 'y ~ s(x)' --data /nonexistent/d.csv --out /tmp/x.jags") == 3);
}
