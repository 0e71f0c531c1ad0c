#include "smoothforge/codegen.hpp"

#include <cmath>
#include <cstdio>

#include "smoothforge/error.hpp"
#include "smoothforge/table.hpp"

namespace smoothforge {

namespace {

std::string range(int first, int last) { return std::to_string(first) + ":" + std::to_string(last); }

void family_lines(const FamilySpec& fam, std::vector<std::string>& out) {
  if (fam.link == Link::identity) {
    out.push_back("  mu <- X %*% b ## expected response");
  } else {
    out.push_back("  eta <- X %*% b ## linear predictor");
    const char* inv = fam.link == Link::log ? "exp" : "ilogit";
    out.push_back(std::string("  for (i in 1:n) { mu[i] <-  ") + inv + "(eta[i]) } ## expected response");
  }
  switch (fam.family) {
    case Family::gaussian:
      out.push_back("  for (i in 1:n) { y[i] ~ dnorm(mu[i], tau) } ## response");
      out.push_back("  scale <- 1 / tau ## convert tau to standard GLM scale");
      out.push_back("  tau ~ dgamma(.05, .005) ## precision parameter prior");
      break;
    case Family::gamma:
      out.push_back("  for (i in 1:n) { y[i] ~ dgamma(r,r/mu[i]) } ## response");
      out.push_back("  r ~ dgamma(.05,.005) ## scale parameter prior");
      out.push_back("  scale <- 1/r ## convert r to standard GLM scale");
      break;
    case Family::binomial:
      out.push_back("  for (i in 1:n) { y[i] ~ dbin(mu[i],w[i]) } ## response");
      break;
    case Family::poisson:
      out.push_back("  for (i in 1:n) { y[i] ~ dpois(mu[i]) } ## response");
      break;
  }
}

}  // namespace

CodegenOptions codegen_options(const Prefit& prefit) {
  return {prefit.options.sp_prior, prefit.options.log_uniform_lo, prefit.options.log_uniform_hi,
          prefit.options.diagonalize};
}

std::string format_constant(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> smooth_prior_block(const SmoothBlock& block, int term_number) {
  std::vector<std::string> out;
  out.push_back("  ## prior for " + block.label + "...");
  const int first = block.coef_offset + 1;
  const int last = block.coef_offset + block.dim();
  if (block.reparam) {
    const int pen = block.reparam->penalized;
    int lam = block.lambda_offset + 1;
    out.push_back("  for (i in " + range(first, first + pen - 1) + ") { b[i] ~ dnorm(0, lambda[" +
                  std::to_string(lam++) + "]) }");
    if (block.null_penalty) {
      out.push_back("  for (i in " + range(first + pen, last) + ") { b[i] ~ dnorm(0, lambda[" + std::to_string(lam) +
                    "]) }");
    }
    return out;
  }
  const std::string K = "K" + std::to_string(term_number);
  const std::string S = "S" + std::to_string(term_number);
  const int d = block.dim();
  std::string line = "  " + K + " <- ";
  const int m = block.lambda_count();
  for (int j = 0; j < m; ++j) {
    if (j > 0) line += (j % 2 == 0) ? " +\n        " : "  + ";
    line += S + "[1:" + std::to_string(d) + "," + range(j * d + 1, (j + 1) * d) + "] * lambda[" +
            std::to_string(block.lambda_offset + j + 1) + "]";
  }
  out.push_back(line);
  out.push_back("  b[" + range(first, last) + "] ~ dmnorm(zero[" + range(first, last) + "]," + K + ")");
  return out;
}

std::vector<std::string> sp_prior_block(int sp_count, const CodegenOptions& options) {
  std::vector<std::string> out;
  if (sp_count <= 0) return out;
  out.push_back("  ## smoothing parameter priors CHECK...");
  out.push_back("  for (i in 1:" + std::to_string(sp_count) + ") {");
  if (options.sp_prior == SmoothingPrior::gamma) {
    out.push_back("    lambda[i] ~ dgamma(.05,.005)");
    out.push_back("    rho[i] <- log(lambda[i])");
  } else {
    if (!std::isfinite(options.log_uniform_lo) || !std::isfinite(options.log_uniform_hi) ||
        !(options.log_uniform_lo < options.log_uniform_hi)) {
      throw Error(ErrorKind::user, "log-uniform smoothing prior needs finite bounds with lo < hi");
    }
    out.push_back("    rho[i] ~ dunif(" + format_double(options.log_uniform_lo) + "," +
                  format_double(options.log_uniform_hi) + ")");
    out.push_back("    lambda[i] <- exp(rho[i])");
  }
  out.push_back("  }");
  return out;
}

std::string emit_model(const Prefit& prefit, const CodegenOptions& options) {
  std::vector<std::string> lines;
  lines.push_back("model {");
  family_lines(prefit.family, lines);

  // One loop over the parametric block at the vaguest of the per-coefficient precisions.
  const double tau = prefit.param_prior_tau.minCoeff();
  lines.push_back("  ## Parameteric effect priors CHECK tau is appropriate!");
  lines.push_back("  for (i in 1:" + std::to_string(prefit.parametric_count()) + ") { b[i] ~ dnorm(0," +
                  format_constant(tau) + ") }");

  int term_number = 0;
  for (const auto& t : prefit.terms) {
    for (auto& l : smooth_prior_block(t, ++term_number)) lines.push_back(std::move(l));
  }
  for (auto& l : sp_prior_block(prefit.sp_count, options)) lines.push_back(std::move(l));
  lines.push_back("}");

  std::string text;
  for (const auto& l : lines) text += l + '\n';
  return text;
}

}  // namespace smoothforge
