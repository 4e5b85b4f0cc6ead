#pragma once

#include <vector>

namespace afmass::numerics {

struct ScaleValue {
  double scale;
  double value;
};

/// Least-squares fit of v(scale) = limit + c1/scale (+ c2/scale^2 for order 2).
struct ExtrapolationResult {
  std::vector<ScaleValue> raw;
  int order = 1;
  double limit = 0.0;
  std::vector<double> coefficients;  // c1 (, c2)
  double residual = 0.0;             // max |fit - value| over raw
  bool monotone_tail = false;        // last three raw values monotone
};

/// Requires >= 4 samples with strictly increasing positive scales spanning at least
/// two decades, and order in {1, 2}. Throws DomainError otherwise.
ExtrapolationResult extrapolate_limit(const std::vector<ScaleValue>& samples, int order = 1);

}  // namespace afmass::numerics
