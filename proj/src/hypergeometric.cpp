#include "afmass/hypergeometric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "afmass/error.hpp"

namespace afmass::numerics {
namespace {

constexpr double kSeriesTol = 1e-13;
constexpr double kTransformThreshold = 0.75;

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::nearbyint(x) == x; }

bool near_integer(double x) { return std::abs(x - std::nearbyint(x)) < 1e-12; }

}  // namespace

double hyp2f1_series(double a, double b, double c, double z, int max_terms) {
  if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c must not be a nonpositive integer");
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < max_terms; ++n) {
    const double dn = static_cast<double>(n);
    term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;
    // Once terms are monotone in magnitude the tail is bounded by a geometric series.
    const double ratio = std::max(
        std::abs((a + dn + 1.0) * (b + dn + 1.0) / ((c + dn + 1.0) * (dn + 2.0)) * z), std::abs(z));
    if (ratio < 1.0) {
      const double tail = std::abs(term) * ratio / (1.0 - ratio);
      if (tail <= kSeriesTol * std::abs(sum)) return sum;
    }
  }
  throw ConvergenceError("hyp2f1: series did not converge within the term cap", sum,
                         std::numeric_limits<double>::infinity());
}

double hyp2f1(double a, double b, double c, double z) {
  if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c must not be a nonpositive integer");
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("hyp2f1: z must lie in [0, 1]");
  if (z == 0.0) return 1.0;
  const double s = c - a - b;
  if (z == 1.0) {
    if (!(s > 0.0)) throw DomainError("hyp2f1: z = 1 requires c - a - b > 0");
    return std::tgamma(c) * std::tgamma(s) / (std::tgamma(c - a) * std::tgamma(c - b));
  }
  if (z <= kTransformThreshold || near_integer(s)) return hyp2f1_series(a, b, c, z);

  // z -> 1 - z connection formula.
  const double w = 1.0 - z;
  double first = 0.0;
  if (!is_nonpositive_integer(c - a) && !is_nonpositive_integer(c - b)) {
    first = std::tgamma(c) * std::tgamma(s) / (std::tgamma(c - a) * std::tgamma(c - b)) *
            hyp2f1_series(a, b, 1.0 - s, w);
  }
  double second = 0.0;
  if (!is_nonpositive_integer(a) && !is_nonpositive_integer(b)) {
    second = std::pow(w, s) * std::tgamma(c) * std::tgamma(-s) / (std::tgamma(a) * std::tgamma(b)) *
             hyp2f1_series(c - a, c - b, s + 1.0, w);
  }
  return first + second;
}

}  // namespace afmass::numerics
