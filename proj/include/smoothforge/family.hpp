#pragma once

#include <string>
#include <string_view>

namespace smoothforge {

enum class Family { gaussian, gamma, binomial, poisson };
enum class Link { identity, log, logit };

/// A response distribution together with its link. Only the canonical-style
/// pairs gaussian/identity, gamma/log, binomial/logit and poisson/log exist.
struct FamilySpec {
  Family family = Family::gaussian;
  Link link = Link::identity;

  bool operator==(const FamilySpec&) const = default;

  double link_fn(double mu) const;
  double inverse_link(double eta) const;
  /// d eta / d mu evaluated at mu.
  double link_derivative(double mu) const;
  /// Variance function V(mu) (binomial: per trial).
  double variance(double mu) const;
  /// IRLS weight w / (V(mu) g'(mu)^2) for prior weight w.
  double irls_weight(double mu, double prior_weight) const;
  /// Whether the family carries a free scale parameter.
  bool has_scale() const noexcept { return family == Family::gaussian || family == Family::gamma; }
};

std::string_view family_name(Family f) noexcept;
std::string_view link_name(Link l) noexcept;

/// Builds a FamilySpec from names; an empty link picks the family's default.
/// Throws Error(user) for unknown names or disallowed pairs.
FamilySpec make_family(std::string_view family, std::string_view link = {});

}  // namespace smoothforge
