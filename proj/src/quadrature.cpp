#include "afmass/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "afmass/error.hpp"

namespace afmass::numerics {
namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

struct Panel {
  double a;
  double b;
  double value;
  double error;
  int piece;
};

struct ByError {
  bool operator()(const Panel& lhs, const Panel& rhs) const { return lhs.error < rhs.error; }
};

// One G10/K21 panel; layout of the node tables follows boost's even Gauss order.
Panel panel(const ScalarFunction& f, double a, double b, int piece, int& evaluations) {
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f0 = f(mid);
  double kronrod = f0 * wk[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double sum = f(mid + half * x[i]) + f(mid - half * x[i]);
    kronrod += sum * wk[i];
    if (i % 2 == 1) gauss += sum * wg[i / 2];
  }
  evaluations += 21;
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod)) {
    throw ConvergenceError("quadrature integrand is not finite on [" + std::to_string(a) + ", " +
                               std::to_string(b) + "]",
                           kronrod, std::numeric_limits<double>::infinity());
  }
  const double err = std::max(std::abs(kronrod - gauss),
                              4.0 * std::numeric_limits<double>::epsilon() * std::abs(kronrod));
  return {a, b, kronrod, err, piece};
}

struct Piece {
  const ScalarFunction* f;
  double a;
  double b;
};

QuadratureResult adaptive(const std::vector<Piece>& pieces, const QuadratureOptions& options,
                          bool& converged) {
  QuadratureResult result;
  std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
  std::vector<Panel> frozen;  // panels too narrow to split further
  double value = 0.0;
  double error = 0.0;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (pieces[k].b <= pieces[k].a) continue;
    Panel p = panel(*pieces[k].f, pieces[k].a, pieces[k].b, static_cast<int>(k), result.evaluations);
    value += p.value;
    error += p.error;
    queue.push(p);
  }
  converged = false;
  const double eps = std::numeric_limits<double>::epsilon();
  while (true) {
    const double target = std::max(options.abs_tol, options.rel_tol * std::abs(value));
    if (error <= target || queue.empty()) {
      converged = error <= target;
      break;
    }
    if (std::abs(value) > options.divergence_bound) break;
    if (result.subdivisions >= options.max_subdivisions) break;
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 8.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen.push_back(worst);
      continue;
    }
    const ScalarFunction& f = *pieces[static_cast<std::size_t>(worst.piece)].f;
    Panel left = panel(f, worst.a, mid, worst.piece, result.evaluations);
    Panel right = panel(f, mid, worst.b, worst.piece, result.evaluations);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++result.subdivisions;
  }
  // Re-sum from the panels to avoid drift of the running totals.
  double v = 0.0;
  double e = 0.0;
  std::vector<Panel> all = std::move(frozen);
  while (!queue.empty()) {
    all.push_back(queue.top());
    queue.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) {
    return l.piece != r.piece ? l.piece < r.piece : l.a < r.a;
  });
  for (const Panel& p : all) {
    v += p.value;
    e += p.error;
  }
  result.value = v;
  result.error = e;
  const double target = std::max(options.abs_tol, options.rel_tol * std::abs(v));
  converged = converged || e <= target;
  return result;
}

}  // namespace

QuadratureResult integrate(const ScalarFunction& f, double a, double b,
                           const QuadratureOptions& options) {
  if (!(a <= b)) throw DomainError("integrate: expected a <= b");
  if (a == b) return {};
  bool converged = false;
  QuadratureResult r = adaptive({Piece{&f, a, b}}, options, converged);
  if (!converged) {
    throw ConvergenceError("integrate: budget exhausted on [" + std::to_string(a) + ", " +
                               std::to_string(b) + "], achieved error " + std::to_string(r.error),
                           r.value, r.error);
  }
  return r;
}

QuadratureResult integrate_improper(const ScalarFunction& f, double r0,
                                    const QuadratureOptions& options) {
  if (!std::isfinite(r0)) throw DomainError("integrate_improper: r0 must be finite");
  const double split = std::max(2.0 * std::abs(r0), r0 + 1.0);
  const double s_max = 1.0 / split;
  const ScalarFunction tail = [&f](double s) { return f(1.0 / s) / (s * s); };

  bool converged = false;
  QuadratureResult r;
  try {
    r = adaptive({Piece{&f, r0, split}, Piece{&tail, 0.0, s_max}}, options, converged);
  } catch (const ConvergenceError& err) {
    // Non-finite samples next to s = 0; decide between divergence and failure below.
    r.value = err.estimate();
    r.error = err.error_bound();
    converged = false;
  }
  if (converged && std::abs(r.value) <= options.divergence_bound) return r;

  if (std::abs(r.value) > options.divergence_bound) {
    throw DivergenceError("integrate_improper: partial integral exceeds divergence bound",
                          r.value, r.error);
  }
  // Dyadic contributions of the transformed tail; integrable endpoint
  // behaviour makes them decay geometrically.
  std::vector<double> contributions;
  int evals = 0;
  double hi = s_max;
  for (int k = 0; k < 60; ++k) {
    const double lo = 0.5 * hi;
    contributions.push_back(std::abs(panel(tail, lo, hi, 0, evals).value));
    hi = lo;
  }
  double ratio = 0.0;
  int counted = 0;
  for (std::size_t k = contributions.size() - 20; k < contributions.size(); ++k) {
    if (contributions[k - 1] > 0.0) {
      ratio += contributions[k] / contributions[k - 1];
      ++counted;
    }
  }
  if (counted > 0 && ratio / counted > 0.9) {
    throw DivergenceError("integrate_improper: tail contributions do not decay (suspected divergence)",
                          r.value, r.error);
  }
  throw ConvergenceError("integrate_improper: budget exhausted, achieved error " +
                             std::to_string(r.error),
                         r.value, r.error);
}

}  // namespace afmass::numerics
