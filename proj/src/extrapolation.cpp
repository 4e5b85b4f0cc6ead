#include "afmass/extrapolation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "afmass/error.hpp"

namespace afmass::numerics {

ExtrapolationResult extrapolate_limit(const std::vector<ScaleValue>& samples, int order) {
  if (order != 1 && order != 2) throw DomainError("extrapolate_limit: order must be 1 or 2");
  if (samples.size() < 4) throw DomainError("extrapolate_limit: need at least 4 samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].scale > 0.0) || !std::isfinite(samples[i].value)) {
      throw DomainError("extrapolate_limit: scales must be positive and values finite");
    }
    if (i > 0 && !(samples[i].scale > samples[i - 1].scale)) {
      throw DomainError("extrapolate_limit: scales must be strictly increasing");
    }
  }
  if (samples.back().scale < 100.0 * samples.front().scale) {
    throw DomainError("extrapolate_limit: scales must span at least two decades");
  }

  // Columns in the variable x = s0 / scale keep the system well conditioned.
  const double s0 = samples.front().scale;
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(n, order + 1);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = s0 / samples[static_cast<std::size_t>(i)].scale;
    design(i, 0) = 1.0;
    design(i, 1) = x;
    if (order == 2) design(i, 2) = x * x;
    rhs(i) = samples[static_cast<std::size_t>(i)].value;
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);

  if (!coef.allFinite()) throw DomainError("extrapolate_limit: fit produced a non-finite limit");

  ExtrapolationResult out;
  out.raw = samples;
  out.order = order;
  out.limit = coef(0);
  out.coefficients.push_back(coef(1) * s0);
  if (order == 2) out.coefficients.push_back(coef(2) * s0 * s0);
  const Eigen::VectorXd fit = design * coef;
  out.residual = (fit - rhs).cwiseAbs().maxCoeff();

  const std::size_t m = samples.size();
  const double d1 = samples[m - 2].value - samples[m - 3].value;
  const double d2 = samples[m - 1].value - samples[m - 2].value;
  out.monotone_tail = (d1 >= 0.0 && d2 >= 0.0) || (d1 <= 0.0 && d2 <= 0.0);
  return out;
}

}  // namespace afmass::numerics
