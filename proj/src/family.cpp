#include "smoothforge/family.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "smoothforge/error.hpp"

namespace smoothforge {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

Link default_link(Family f) {
  switch (f) {
    case Family::gaussian: return Link::identity;
    case Family::gamma: return Link::log;
    case Family::binomial: return Link::logit;
    case Family::poisson: return Link::log;
  }
  return Link::identity;
}

}  // namespace

double FamilySpec::link_fn(double mu) const {
  switch (link) {
    case Link::identity: return mu;
    case Link::log: return std::log(mu);
    case Link::logit: return std::log(mu / (1.0 - mu));
  }
  return mu;
}

double FamilySpec::inverse_link(double eta) const {
  switch (link) {
    case Link::identity: return eta;
    case Link::log: return std::exp(eta);
    case Link::logit: {
      if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
      const double e = std::exp(eta);
      return e / (1.0 + e);
    }
  }
  return eta;
}

double FamilySpec::link_derivative(double mu) const {
  switch (link) {
    case Link::identity: return 1.0;
    case Link::log: return 1.0 / mu;
    case Link::logit: return 1.0 / (mu * (1.0 - mu));
  }
  return 1.0;
}

double FamilySpec::variance(double mu) const {
  switch (family) {
    case Family::gaussian: return 1.0;
    case Family::gamma: return mu * mu;
    case Family::binomial: return mu * (1.0 - mu);
    case Family::poisson: return mu;
  }
  return 1.0;
}

double FamilySpec::irls_weight(double mu, double prior_weight) const {
  const double g = link_derivative(mu);
  return prior_weight / (variance(mu) * g * g);
}

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::gamma: return "gamma";
    case Family::binomial: return "binomial";
    case Family::poisson: return "poisson";
  }
  return "?";
}

std::string_view link_name(Link l) noexcept {
  switch (l) {
    case Link::identity: return "identity";
    case Link::log: return "log";
    case Link::logit: return "logit";
  }
  return "?";
}

FamilySpec make_family(std::string_view family, std::string_view link) {
  const std::string f = lower(family);
  FamilySpec spec;
  if (f == "gaussian") spec.family = Family::gaussian;
  else if (f == "gamma") spec.family = Family::gamma;
  else if (f == "binomial") spec.family = Family::binomial;
  else if (f == "poisson") spec.family = Family::poisson;
  else throw Error(ErrorKind::user, "unknown family '" + std::string(family) + "'");

  spec.link = default_link(spec.family);
  if (!link.empty()) {
    const std::string l = lower(link);
    if (l == "identity") spec.link = Link::identity;
    else if (l == "log") spec.link = Link::log;
    else if (l == "logit") spec.link = Link::logit;
    else throw Error(ErrorKind::user, "unknown link '" + std::string(link) + "'");
  }
  if (spec.link != default_link(spec.family)) {
    throw Error(ErrorKind::user, "link " + std::string(link_name(spec.link)) + " is not supported for family " +
                                     std::string(family_name(spec.family)));
  }
  return spec;
}

}  // namespace smoothforge
