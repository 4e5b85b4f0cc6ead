#include "afmass/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "afmass/error.hpp"
#include "afmass/roots.hpp"

namespace afmass::geometry {

using std::numbers::pi;

double sphere_area(const RadialMetric& metric, double r) {
  metric.require_in_domain(r, "sphere_area");
  const double rho = metric.areal(r).value;
  return 4.0 * pi * rho * rho;
}

double mean_curvature(const RadialMetric& metric, double r) {
  metric.require_in_domain(r, "mean_curvature");
  const Jet rho = metric.areal(r);
  if (rho.value == 0.0) throw DomainError("mean_curvature: sphere degenerates to the pole");
  return 2.0 * rho.d1 / (rho.value * metric.lapse(r).value);
}

double enclosed_volume(const RadialMetric& metric, double r1, double r2,
                       const numerics::QuadratureOptions& options) {
  metric.require_in_domain(r1, "enclosed_volume");
  metric.require_in_domain(r2, "enclosed_volume");
  if (r2 < r1) throw DomainError("enclosed_volume: expected r1 <= r2");
  if (r1 == r2) return 0.0;
  auto density = [&metric](double s) {
    const double rho = metric.areal(s).value;
    return 4.0 * pi * rho * rho * metric.lapse(s).value;
  };
  return numerics::integrate(density, r1, r2, options).value;
}

double scalar_curvature(const RadialMetric& metric, double r) {
  metric.require_in_domain(r, "scalar_curvature");
  const Jet phi = metric.lapse(r);
  const Jet rho = metric.areal(r);
  if (rho.value == 0.0) throw DomainError("scalar_curvature: warped formula is singular at the pole");
  const double p2 = phi.value * phi.value;
  return 2.0 / (rho.value * rho.value) - 2.0 * rho.d1 * rho.d1 / (p2 * rho.value * rho.value) -
         4.0 * rho.d2 / (p2 * rho.value) + 4.0 * rho.d1 * phi.d1 / (p2 * phi.value * rho.value);
}

double scalar_curvature_conformal(const RadialMetric& metric, double r) {
  metric.require_in_domain(r, "scalar_curvature_conformal");
  const Jet u = metric.conformal_factor(r);
  const double laplacian = (r == 0.0) ? 3.0 * u.d2 : u.d2 + 2.0 * u.d1 / r;
  return -8.0 * laplacian / std::pow(u.value, 5);
}

double hawking_mass(const RadialMetric& metric, double r) {
  metric.require_in_domain(r, "hawking_mass");
  const Jet rho = metric.areal(r);
  const double slope = rho.d1 / metric.lapse(r).value;
  return 0.5 * rho.value * (1.0 - slope) * (1.0 + slope);
}

double hawking_mass_from(double area, double willmore) {
  return std::sqrt(area / (16.0 * pi)) * (1.0 - willmore / (16.0 * pi));
}

SphereData sphere_data(const RadialMetric& metric, double r, const numerics::QuadratureOptions& options) {
  SphereData s;
  s.r = r;
  s.area = sphere_area(metric, r);
  s.volume = enclosed_volume(metric, metric.r_min(), r, options);
  if (metric.areal(r).value > 0.0) {
    s.mean_curvature = mean_curvature(metric, r);
    s.willmore = s.area * s.mean_curvature * s.mean_curvature;
  } else {
    s.mean_curvature = std::numeric_limits<double>::infinity();
    s.willmore = 16.0 * pi;
  }
  s.hawking = hawking_mass(metric, r);
  return s;
}

double isoperimetric_deficit(const RadialMetric& metric, double r, const numerics::QuadratureOptions& options) {
  metric.require_in_domain(r, "isoperimetric_deficit");
  const double r0 = metric.r_min();
  const double rho0 = metric.areal(r0).value;
  double integral = 0.0;
  if (r > r0) {
    auto density = [&metric](double s) {
      const Jet rho = metric.areal(s);
      if (metric.has_conformal_factor()) {
        // lapse - areal' = -2 u u' r without cancellation
        const Jet u = metric.conformal_factor(s);
        return -8.0 * pi * rho.value * rho.value * u.value * u.d1 * s;
      }
      return 4.0 * pi * rho.value * rho.value * (metric.lapse(s).value - rho.d1);
    };
    integral = numerics::integrate(density, r0, r, options).value;
  }
  return integral - 4.0 * pi / 3.0 * rho0 * rho0 * rho0;
}

ProfilePoint radial_profile(const RadialMetric& metric, double volume, const numerics::QuadratureOptions& options) {
  if (!(volume >= 0.0) || !std::isfinite(volume)) throw DomainError("radial_profile: volume must be >= 0");
  const double r0 = metric.r_min();
  ProfilePoint p;
  p.volume = volume;
  if (volume == 0.0) {
    p.r = r0;
  } else {
    auto excess = [&](double r) { return enclosed_volume(metric, r0, r, options) - volume; };
    double hi = std::max(2.0 * r0, r0 + 1.0);
    double lo = r0;
    while (excess(hi) < 0.0) {
      if (hi >= metric.r_max()) {
        throw DomainError("radial_profile: volume " + std::to_string(volume) + " exceeds the metric domain");
      }
      lo = hi;
      hi = std::min(2.0 * hi, metric.r_max());
    }
    p.r = numerics::find_root(excess, lo, hi);
  }
  p.area = sphere_area(metric, p.r);
  p.derivative = (metric.areal(p.r).value > 0.0) ? mean_curvature(metric, p.r)
                                                   : std::numeric_limits<double>::infinity();
  return p;
}

CurvatureScan scan_scalar_curvature(const RadialMetric& metric, double lo, double hi, int points) {
  if (!(hi > lo) || points < 2) throw DomainError("scan_scalar_curvature: need lo < hi and >= 2 points");
  metric.require_in_domain(lo, "scan_scalar_curvature");
  metric.require_in_domain(hi, "scan_scalar_curvature");
  CurvatureScan scan;
  scan.min_scalar = std::numeric_limits<double>::infinity();
  // Geometric spacing in the offset from lo, so both the core and the far field are sampled.
  const double first = std::max((hi - lo) * 1e-6, 1e-9);
  const double ratio = std::pow((hi - lo) / first, 1.0 / (points - 2));
  for (int i = 0; i < points; ++i) {
    const double r = (i == 0) ? lo : (i == points - 1 ? hi : lo + first * std::pow(ratio, i - 1));
    const double rho = metric.areal(r).value;
    if (rho == 0.0) continue;
    const double scal = metric.has_conformal_factor() ? scalar_curvature_conformal(metric, r)
                                                      : scalar_curvature(metric, r);
    ++scan.samples;
    if (scal < scan.min_scalar) {
      scan.min_scalar = scal;
      scan.at_r = r;
    }
    if (scal < -1e-9 * 2.0 / (rho * rho)) scan.nonnegative = false;
  }
  return scan;
}

FlatnessDiagnostics flatness_diagnostics(const RadialMetric& metric, int decades) {
  FlatnessDiagnostics d;
  const double base = std::max(1.0, metric.r_min());
  double r = 10.0 * base;
  for (int i = 0; i < decades && r <= metric.r_max(); ++i, r *= 10.0) {
    d.radii.push_back(r);
    d.areal_deviation.push_back(std::abs(metric.areal(r).value / r - 1.0));
    d.lapse_deviation.push_back(std::abs(metric.lapse(r).value - 1.0));
  }
  d.decreasing = d.radii.size() >= 2;
  for (std::size_t i = 1; i < d.radii.size(); ++i) {
    if (d.areal_deviation[i] > d.areal_deviation[i - 1] || d.lapse_deviation[i] > d.lapse_deviation[i - 1]) {
      d.decreasing = false;
    }
  }
  return d;
}

double schwarzschild_coordinate_radius(double mass, double areal_radius) {
  if (!(mass > 0.0) || !(areal_radius >= 2.0 * mass)) {
    throw DomainError("schwarzschild_coordinate_radius: need m > 0 and s >= 2m");
  }
  const double s = areal_radius;
  return 0.5 * (s - mass + std::sqrt(s * s - 2.0 * s * mass));
}

}  // namespace afmass::geometry
