#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "afmass/geometry.hpp"

namespace afmass::imcf {

using geometry::RadialMetric;

struct HullOptions {
  /// Far radius of the sweep; 0 selects 1e4 * max(1, r_min), capped at r_max of the metric.
  double r_far = 0.0;
  int grid_points = 20000;
  /// A radius is fattened when hull area < A(r) (1 - jump_tolerance).
  double jump_tolerance = 1e-12;
};

/// Maximal radius interval (r_a, r_b) swallowed by the hull. A(r_a) = A(r_b) = area and
/// A > area strictly inside; r_b is the dip that attains the tail infimum.
struct JumpRegion {
  double r_a = 0.0;
  double r_b = 0.0;
  double area = 0.0;
};

/// Tail infimum of the sphere area, Â(r) = inf_{s >= r} A(s), on [r_start, r_far].
/// Built by one inward sweep over a geometric grid; jump endpoints are refined by
/// root finding.
class Hull {
 public:
  /// Throws PreconditionError when the far sphere does not dominate every interior area
  /// (the tail is not bounded below by the sweep, asymptotic flatness fails numerically).
  static Hull compute(const RadialMetric& metric, double r_start, const HullOptions& options = {});

  double r_start() const noexcept { return r_start_; }
  double r_far() const noexcept { return r_far_; }
  const std::vector<JumpRegion>& jumps() const noexcept { return jumps_; }

  /// Â(r) for r_start <= r <= r_far.
  double area(double r) const;
  /// Largest radius attaining Â(r): r itself off the jump regions, r_b inside (r_a, r_b).
  double attained_at(double r) const;
  /// r lies strictly inside a jump region.
  bool fattened(double r) const;

 private:
  Hull(RadialMetric metric) : metric_(std::move(metric)) {}
  const JumpRegion* region(double r) const;
  RadialMetric metric_;
  double r_start_ = 0.0;
  double r_far_ = 0.0;
  bool start_fattened_ = false;
  std::vector<JumpRegion> jumps_;
};

struct TailMinimum {
  double area = 0.0;
  double radius = 0.0;
};

/// inf_{s >= r} A(s) and the largest radius attaining it.
TailMinimum tail_min_area(const RadialMetric& metric, double r, const HullOptions& options = {});

enum class FlowOrigin { Boundary, Pole };

struct FlowSample {
  double t = 0.0;
  double r = 0.0;
  double area = 0.0;
  double volume = 0.0;
  double hawking = 0.0;
};

/// Fattening of the level set at time t: {w <= t} jumps from the ball of radius
/// r_before to the ball of radius r_after.
struct FlowJump {
  double t = 0.0;
  double r_before = 0.0;
  double r_after = 0.0;
  double area = 0.0;
  double volume_before = 0.0;
  double volume_after = 0.0;
  double hawking_before = 0.0;
  double hawking_after = 0.0;
};

/// One row of the merged sequence: every sample, with the pre-jump sphere inserted
/// before each jump time. is_jump marks both rows at a jump time.
struct FlowRow {
  FlowSample sample;
  bool is_jump = false;
};

struct FlowOptions {
  double dt = 0.01;
  /// First time of a pole flow (t -> -inf at the pole).
  double t_min = -8.0;
  /// Last time; NaN selects the time at which the flow reaches coordinate radius
  /// 1e3 * max(1, r_min) (or the hull far radius if smaller).
  double t_max = std::numeric_limits<double>::quiet_NaN();
  HullOptions hull;
  numerics::QuadratureOptions quadrature;
};

/// Weak IMCF in radial symmetry: w(r) = log(Â(r) / normalization), Omega_t = {w <= t}.
struct FlowRecord {
  RadialMetric metric;
  std::shared_ptr<const Hull> hull;
  FlowOrigin origin = FlowOrigin::Boundary;
  double r_start = 0.0;
  double normalization = 0.0;  // A_0, or 4 pi for pole flows
  std::vector<FlowSample> samples;
  std::vector<FlowJump> jumps;

  /// w(r) for r in the swept range.
  double w(double r) const;
  /// r(t) = sup{r : w(r) <= t}; right-continuous, equals r_after at a jump time.
  double radius_at(double t) const;
  /// |{w <= t}|.
  double volume_at(double t) const;
  /// Merged sequence used for monotonicity checks and CSV output.
  std::vector<FlowRow> merged() const;
};

FlowRecord weak_imcf(const RadialMetric& metric, double r_start, const FlowOptions& options = {});

/// Requires a complete metric (pole at r_min = 0).
FlowRecord imcf_from_pole(const RadialMetric& metric, const FlowOptions& options = {});

/// inf{tau : |{w <= tau}| >= v}. For v inside the volume gap of a jump this is the jump time.
/// Throws DomainError for v <= 0 or v beyond the recorded volume.
double t_of_v(const FlowRecord& flow, double v);

/// dm_H/dt = sqrt(A) / (16 pi)^{3/2} * Scal * A on a smooth stretch of the flow.
double geroch_derivative(const RadialMetric& metric, double r);

/// CSV header `t,r,area,volume,hawking,is_jump`, one line per merged row.
void write_csv(const FlowRecord& flow, std::ostream& out);
std::string to_json(const FlowRecord& flow, int indent = 2);

}  // namespace afmass::imcf
