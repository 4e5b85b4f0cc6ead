#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "afmass/expression.hpp"

namespace afmass::geometry {

using JetFunction = std::function<Jet(double)>;

enum class MetricKind { Euclidean, Schwarzschild, Conformal, Warped };

std::string to_string(MetricKind kind);

/// Rotationally symmetric metric g = lapse(r)^2 dr^2 + areal(r)^2 g_{S^2} on r >= r_min.
///
/// Immutable; copies share the underlying model. Construction validates
/// lapse > 0 and areal > 0 on a scan grid (areal(0) = 0 is allowed for a pole at
/// r_min = 0) and records the boundary-minimality and non-outward-minimizing flags.
class RadialMetric {
 public:
  static RadialMetric euclidean();
  /// Isotropic chart (1 + m / 2r)^4 delta with the minimal sphere at r_min = m / 2.
  static RadialMetric schwarzschild(double mass);
  /// g = u^4 delta, i.e. lapse = u^2 and areal = u^2 r.
  static RadialMetric conformal(const RadialExpression& u, double r_min = 0.0);
  static RadialMetric conformal(JetFunction u, double r_min, std::string description);
  static RadialMetric warped(JetFunction lapse, JetFunction areal, double r_min, std::string description,
                             double r_max = std::numeric_limits<double>::infinity());
  static RadialMetric warped(const RadialExpression& lapse, const RadialExpression& areal,
                             double r_min = 0.0);
  /// Tabulated lapse and areal radius, interpolated by clamped cubic splines.
  /// Needs at least 16 strictly increasing rows; the domain is the table range.
  static RadialMetric from_table(std::span<const double> r, std::span<const double> lapse,
                                 std::span<const double> areal, std::string description = "table");
  /// CSV with header `r,phi,rho`.
  static RadialMetric from_csv(const std::filesystem::path& path);

  MetricKind kind() const noexcept;
  /// Mass parameter of the Schwarzschild model, empty for every other kind.
  std::optional<double> schwarzschild_mass() const noexcept;
  const std::string& description() const noexcept;

  double r_min() const noexcept;
  /// Upper end of the domain; infinite except for tabulated metrics.
  double r_max() const noexcept;

  Jet lapse(double r) const;
  Jet areal(double r) const;
  bool has_conformal_factor() const noexcept;
  /// Throws DomainError when the metric was not built from a conformal factor.
  Jet conformal_factor(double r) const;

  /// |areal'(r_min)| <= 1e-10 max(1, |areal(r_min)|).
  bool boundary_minimal() const noexcept;
  /// areal' < 0 somewhere on the scan grid ("non-outward-minimizing region present").
  bool has_non_outward_minimizing_region() const noexcept;
  /// No boundary: the chart closes at a pole r_min = 0 with areal(0) = 0.
  bool complete() const noexcept;

  /// Throws DomainError unless r_min <= r <= r_max.
  void require_in_domain(double r, const char* operation) const;

 private:
  struct Model;
  explicit RadialMetric(std::shared_ptr<const Model> model);
  static RadialMetric finish(std::shared_ptr<Model> model);
  std::shared_ptr<const Model> model_;
};

/// Largest r in [lo, hi] with areal'(r) = 0, located by a sign scan refined by
/// root finding. Empty when areal' has no sign change on the scan grid.
std::optional<double> find_outermost_minimal_sphere(const RadialMetric& metric, double lo, double hi);

/// Same search on a bare conformal factor (areal = u^2 r). Used to place r_min
/// on the horizon when building horizon models.
std::optional<double> find_outermost_minimal_sphere(const JetFunction& u, double lo, double hi);

/// u^4 delta on the exterior of the outermost minimal sphere of u in [lo, hi].
/// Throws PreconditionError when u has no minimal sphere there.
RadialMetric conformal_exterior(const RadialExpression& u, double lo = 1e-6, double hi = 1e3);

/// Central-difference derivatives of the value channel of f. The first
/// derivative uses h = max(1e-6, 1e-6 r); the second uses h = max(1e-4, 1e-4 r).
Jet finite_difference_jet(const JetFunction& f, double r);

}  // namespace afmass::geometry
