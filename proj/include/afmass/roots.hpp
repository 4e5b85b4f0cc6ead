#pragma once

#include "afmass/quadrature.hpp"

namespace afmass::numerics {

/// Root of f in the bracket [lo, hi]; f(lo) and f(hi) must differ in sign (or vanish).
/// Throws DomainError when the bracket is invalid, ConvergenceError when the
/// iteration cap is hit.
double find_root(const ScalarFunction& f, double lo, double hi, int max_iterations = 300);

}  // namespace afmass::numerics
