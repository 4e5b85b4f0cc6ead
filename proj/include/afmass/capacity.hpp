#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "afmass/geometry.hpp"

namespace afmass::capacity {

using geometry::RadialMetric;

/// Highest exponent accepted; the tail integrand exponent -2/(p-1) degenerates as p -> 3.
inline constexpr double kMaxExponent = 2.9;

struct PotentialSample {
  double r = 0.0;
  double u = 0.0;
};

struct CompetitorEnergy {
  double epsilon = 0.0;
  double center = 0.0;
  double width = 0.0;
  double energy_gain = 0.0;  // E[u + eps bump] - E[u]
};

/// Normalized p-capacity of the coordinate sphere S_{r0} as inner boundary of its exterior.
struct CapacitySolution {
  double p = 0.0;
  double r0 = 0.0;
  double ncap = 0.0;
  double tail_integral = 0.0;  // T = int_{r0}^inf lapse * areal^{-2/(p-1)} dr
  double tail_error = 0.0;
  double energy = 0.0;  // unnormalized p-energy 4 pi T^{1-p} of the minimizer
  std::vector<PotentialSample> potential;
  std::vector<CompetitorEnergy> competitors;
  bool minimality_verified = false;
};

struct CapacityOptions {
  numerics::QuadratureOptions quadrature{1e-12};
  /// Reporting grid for the potential, geometric on [r0, potential_extent * max(r0, 1)].
  int potential_samples = 64;
  double potential_extent = 1e3;
  /// Compare against three perturbed competitors u + eps * bump.
  bool check_minimality = true;
};

/// Radius (times max(1, r0)) beyond which tails are continued by the Euclidean model.
inline constexpr double kTailRadius = 1e12;

/// T = int_{r0}^inf lapse areal^{-2/(p-1)} dr, integrated decade by decade in log r up to
/// kTailRadius * max(1, r0) (or r_max of a tabulated metric) and continued from there by
/// the Euclidean tail in arc length from r_end. Requires |areal' / lapse - 1| <= 1e-3 at r_end.
/// Throws DivergenceError when the decade contributions stop decaying.
numerics::QuadratureResult tail_integral(const RadialMetric& metric, double r0, double p,
                                         const numerics::QuadratureOptions& options = {1e-12});

/// Closed-form radial minimizer u(r) = T(r)/T(r0) and ncap = [((3-p)/(p-1)) T]^{-(p-1)}.
/// Requires 1 < p <= 2.9 and r0 >= r_min.
CapacitySolution p_capacity_radial(const RadialMetric& metric, double r0, double p,
                                   const CapacityOptions& options = {});

/// p-energy 4 pi int |v'|^p lapse^{1-p} areal^2 dr of v = u + eps * b on the exterior of S_{r0},
/// minus that of u, where b = sin^2 bump supported on [center - width/2, center + width/2].
double competitor_energy_gain(const RadialMetric& metric, const CapacitySolution& solution, double epsilon,
                              double center, double width);

/// (area/4pi)^{(3-p)/2} 2F1(1/2, (3-p)/(p-1), 2/(p-1); 1 - willmore/16pi)^{-(p-1)}.
/// Throws DomainError for willmore > 16 pi (outside the reverse-Willmore regime), negative
/// willmore, nonpositive area or p outside (1, 3).
double bray_miao_bound(double area, double willmore, double p);

std::string to_json(const CapacitySolution& solution, int indent = 2);
/// CSV header `r,u`.
void write_potential_csv(const CapacitySolution& solution, std::ostream& out);

}  // namespace afmass::capacity
