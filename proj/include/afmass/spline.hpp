#pragma once

#include <span>
#include <vector>

#include "afmass/expression.hpp"

namespace afmass::geometry {

/// C2 cubic spline through (x_i, y_i) with clamped ends. End slopes come from
/// the one-sided three-point difference of the data.
class CubicSpline {
 public:
  /// x strictly increasing, at least 4 nodes. Throws DomainError otherwise.
  CubicSpline(std::span<const double> x, std::span<const double> y);

  /// Valid on [front, back]; throws DomainError outside.
  Jet jet(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the nodes
};

}  // namespace afmass::geometry
