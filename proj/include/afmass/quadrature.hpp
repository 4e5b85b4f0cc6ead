#pragma once

#include <functional>

namespace afmass::numerics {

using ScalarFunction = std::function<double(double)>;

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_subdivisions = 4000;
  /// |partial integral| beyond this bound is treated as divergence.
  double divergence_bound = 1e300;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod quadrature on [a, b] (a <= b).
/// Subdivides the interval with the largest error estimate until the total
/// estimate drops below max(abs_tol, rel_tol * |value|).
/// Throws ConvergenceError with the best estimate when the budget runs out.
QuadratureResult integrate(const ScalarFunction& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Integral of f over [r0, inf). The range is split at a finite radius R*,
/// [r0, R*] is integrated directly and [R*, inf) through s = 1/r on (0, 1/R*].
/// Both pieces share one error budget. Throws DivergenceError when the tail
/// contributions near s = 0 fail to decay or the partial integral exceeds
/// options.divergence_bound.
QuadratureResult integrate_improper(const ScalarFunction& f, double r0,
                                    const QuadratureOptions& options = {});

}  // namespace afmass::numerics
