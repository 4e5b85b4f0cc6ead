#pragma once

#include <vector>

#include "afmass/metric.hpp"
#include "afmass/quadrature.hpp"

namespace afmass::geometry {

/// Geometry of the coordinate sphere S_r. Radial symmetry makes H constant on S_r,
/// so willmore = area * mean_curvature^2.
struct SphereData {
  double r = 0.0;
  double area = 0.0;
  double volume = 0.0;  // enclosed between r_min and r
  double mean_curvature = 0.0;
  double willmore = 0.0;
  double hawking = 0.0;
};

/// Relative tolerance used for volume integrals unless the caller overrides it.
inline constexpr double kVolumeTolerance = 1e-10;

double sphere_area(const RadialMetric& metric, double r);

/// H = 2 areal' / (areal * lapse) for the outward normal. Throws DomainError at a pole.
double mean_curvature(const RadialMetric& metric, double r);

/// Integral of 4 pi areal^2 lapse over [r1, r2], r_min <= r1 <= r2.
double enclosed_volume(const RadialMetric& metric, double r1, double r2,
                       const numerics::QuadratureOptions& options = {});

/// Warped-product scalar curvature from the lapse and areal jets.
double scalar_curvature(const RadialMetric& metric, double r);

/// -8 u^-5 (u'' + 2u'/r) for metrics built from a conformal factor; at r = 0 the
/// Laplacian is 3 u''(0). Throws DomainError for metrics without a conformal factor.
double scalar_curvature_conformal(const RadialMetric& metric, double r);

/// (areal / 2) (1 - (areal' / lapse)^2), the Hawking mass sqrt(A/16pi)(1 - A H^2 / 16pi) of S_r.
double hawking_mass(const RadialMetric& metric, double r);

/// sqrt(A/16pi)(1 - willmore/16pi) from raw sphere data.
double hawking_mass_from(double area, double willmore);

SphereData sphere_data(const RadialMetric& metric, double r,
                       const numerics::QuadratureOptions& options = {});

/// |Omega_r| - |S_r|^{3/2} / (6 sqrt(pi)) for the region between r_min and r, computed
/// as the integral of 4 pi areal^2 (lapse - areal') minus (4pi/3) areal(r_min)^3 so
/// that the growing volume and the Euclidean comparison term never cancel numerically.
double isoperimetric_deficit(const RadialMetric& metric, double r,
                             const numerics::QuadratureOptions& options = {});

struct ProfilePoint {
  double volume = 0.0;
  double r = 0.0;
  double area = 0.0;        // I_rad(V)
  double derivative = 0.0;  // I_rad'(V) = H(r(V))
};

/// Radial isoperimetric profile at enclosed volume V >= 0. r(V) is found by
/// bracketing the volume function and refining with a root finder.
ProfilePoint radial_profile(const RadialMetric& metric, double volume,
                            const numerics::QuadratureOptions& options = {});

/// Minimum of the scalar curvature over a sample grid on [lo, hi], together with
/// the scale-aware nonnegativity verdict Scal >= -1e-9 * 2/areal^2 at every node.
struct CurvatureScan {
  double min_scalar = 0.0;
  double at_r = 0.0;
  bool nonnegative = true;
  int samples = 0;
};
CurvatureScan scan_scalar_curvature(const RadialMetric& metric, double lo, double hi, int points = 400);

/// |areal/r - 1| and |lapse - 1| on a decade ladder 10, 100, ... (times max(1, r_min)),
/// truncated at r_max.
struct FlatnessDiagnostics {
  std::vector<double> radii;
  std::vector<double> areal_deviation;
  std::vector<double> lapse_deviation;
  bool decreasing = false;
};
FlatnessDiagnostics flatness_diagnostics(const RadialMetric& metric, int decades = 6);

/// Isotropic coordinate radius of the Schwarzschild sphere with areal radius s >= 2m.
double schwarzschild_coordinate_radius(double mass, double areal_radius);

}  // namespace afmass::geometry
