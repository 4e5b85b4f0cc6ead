#pragma once

namespace afmass::numerics {

/// Gauss hypergeometric function 2F1(a, b; c; z) for real parameters and 0 <= z <= 1.
///
/// The Gauss series is summed by term recurrence to relative tolerance 1e-13 for
/// z <= 0.75. For 0.75 < z < 1 the linear transformation z -> 1 - z is applied
/// (requires c - a - b non-integer; otherwise the direct series is used and may hit
/// the term cap). At z = 1 the Gamma-ratio value G(c)G(c-a-b) / (G(c-a)G(c-b)) is
/// returned, which needs c - a - b > 0.
///
/// Throws DomainError for c a nonpositive integer, z outside [0, 1] or a divergent
/// z = 1 evaluation; ConvergenceError when the series term cap is reached.
double hyp2f1(double a, double b, double c, double z);

/// Gauss series only, no transformation; exposed for cross-checks.
double hyp2f1_series(double a, double b, double c, double z, int max_terms = 200000);

}  // namespace afmass::numerics
