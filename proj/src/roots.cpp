#include "afmass/roots.hpp"

#include <cmath>
#include <cstdint>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "afmass/error.hpp"

namespace afmass::numerics {

double find_root(const ScalarFunction& f, double lo, double hi, int max_iterations) {
  if (!(lo <= hi)) throw DomainError("find_root: expected lo <= hi");
  const double flo = f(lo);
  if (flo == 0.0) return lo;
  const double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0.0) == (fhi > 0.0)) {
    throw DomainError("find_root: root not bracketed on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  std::uintmax_t iterations = static_cast<std::uintmax_t>(max_iterations);
  const auto [a, b] = boost::math::tools::toms748_solve(
      [&f](double x) { return f(x); }, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(),
      iterations);
  if (iterations >= static_cast<std::uintmax_t>(max_iterations)) {
    throw ConvergenceError("find_root: iteration cap reached", 0.5 * (a + b), b - a);
  }
  // Return the endpoint with the smaller residual.
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

}  // namespace afmass::numerics
