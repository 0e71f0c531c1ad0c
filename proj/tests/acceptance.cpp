// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is non-zero if any criterion fails.

#include <exception>
#include <functional>
#include <iostream>

#include "checks.hpp"

int main() {
  const std::vector<std::pair<std::string, std::function<checks::Result()>>> criteria{
      {"golden structure, gamma additive model", checks::golden_gamma},
      {"golden structure, binomial model", checks::golden_union},
      {"golden structure, diagonalized gaussian model", checks::golden_sitka},
      {"reparameterization invariance", [] { return checks::reparameterization_invariance(); }},
      {"prior propriety", [] { return checks::propriety(); }},
      {"conjugate sampler exactness",
       [] {
         checks::Stopwatch sw;
         auto a = checks::conditional_exactness();
         const auto b = checks::fixed_lambda_ridge();
         if (!b.ok) a.fail("ridge: " + b.detail);
         const double t = sw.seconds();
         if (t >= 30) a.fail("took " + checks::fmt(t) + " s");
         if (a.ok) a.detail += "; ridge " + b.detail + "; " + checks::fmt(t) + " s";
         return a;
       }},
      {"recovery of sin(2 pi x)", checks::recovery},
      {"EDF limits", checks::edf_limits},
      {"determinism", checks::determinism},
      {"dump format fidelity", checks::dump_fidelity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    checks::Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what());
    }
    if (!r.ok) ++failed;
    std::cout << (r.ok ? "PASS " : "FAIL ") << (i + 1) << ". " << criteria[i].first << ": " << r.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
