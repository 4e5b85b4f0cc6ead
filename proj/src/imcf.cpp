#include "afmass/imcf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/tools/minima.hpp>

#include "afmass/error.hpp"
#include "afmass/format.hpp"
#include "afmass/roots.hpp"
#include "json.hpp"

namespace afmass::imcf {

using std::numbers::pi;

namespace {

double area_at(const RadialMetric& m, double r) {
  const double rho = m.areal(r).value;
  return 4.0 * pi * rho * rho;
}

double default_far_radius(const RadialMetric& metric, double r_start, const HullOptions& options) {
  double far = options.r_far > 0.0 ? options.r_far
                                   : std::max(1e4 * std::max(1.0, metric.r_min()), 10.0 * std::max(1.0, r_start));
  return std::min(far, metric.r_max());
}

// Local minimum of A near grid index j: root of areal' when it changes sign, otherwise Brent.
double refine_dip(const RadialMetric& m, double lo, double hi) {
  auto slope = [&m](double r) { return m.areal(r).d1; };
  if (slope(lo) <= 0.0 && slope(hi) >= 0.0) return numerics::find_root(slope, lo, hi);
  const auto res = boost::math::tools::brent_find_minima([&m](double r) { return area_at(m, r); }, lo, hi,
                                                         std::numeric_limits<double>::digits / 2);
  return res.first;
}

}  // namespace

Hull Hull::compute(const RadialMetric& metric, double r_start, const HullOptions& options) {
  metric.require_in_domain(r_start, "hull");
  if (options.grid_points < 16) throw DomainError("hull: grid_points must be at least 16");
  Hull hull(metric);
  hull.r_start_ = r_start;
  hull.r_far_ = default_far_radius(metric, r_start, options);
  if (!(hull.r_far_ > r_start)) throw DomainError("hull: start radius at or beyond the far radius");

  const int n = options.grid_points;
  const double span = hull.r_far_ - r_start;
  const double first = std::min(1e-6 * std::max(1.0, r_start), 1e-3 * span);
  const double ratio = std::pow(span / first, 1.0 / (n - 2));
  std::vector<double> r(static_cast<std::size_t>(n));
  std::vector<double> area(r.size());
  r[0] = r_start;
  for (int i = 1; i < n; ++i) r[static_cast<std::size_t>(i)] = r_start + first * std::pow(ratio, i - 1);
  r.back() = hull.r_far_;
  for (std::size_t i = 0; i < r.size(); ++i) area[i] = area_at(metric, r[i]);

  const double far_area = area.back();
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (!(far_area > area[i])) {
      throw PreconditionError("hull: area at the far radius " + std::to_string(hull.r_far_) +
                              " does not exceed the interior area at r = " + std::to_string(r[i]) +
                              " (tail not bounded below; metric not asymptotically flat on the sweep)");
    }
  }

  // Inward sweep: tail[i] = min_{k >= i} area[k].
  std::vector<double> tail(r.size());
  tail.back() = area.back();
  for (std::size_t i = r.size() - 1; i-- > 0;) tail[i] = std::min(area[i], tail[i + 1]);
  auto fattened = [&](std::size_t i) { return tail[i + 1] < area[i] * (1.0 - options.jump_tolerance); };

  std::size_t i = 0;
  while (i + 1 < r.size()) {
    if (!fattened(i)) {
      ++i;
      continue;
    }
    const std::size_t i0 = i;
    while (i + 1 < r.size() && fattened(i)) ++i;
    const std::size_t j = i;  // dip: first non-fattened point after the run
    const double lo = r[j - 1];
    const double hi = (j + 1 < r.size()) ? r[j + 1] : r[j];
    JumpRegion region;
    region.r_b = refine_dip(metric, lo, hi);
    region.area = area_at(metric, region.r_b);
    if (i0 == 0) {
      region.r_a = r_start;
      hull.start_fattened_ = true;
    } else {
      const double level = region.area;
      region.r_a = numerics::find_root([&](double x) { return area_at(metric, x) - level; }, r[i0 - 1], r[i0]);
    }
    hull.jumps_.push_back(region);
  }
  return hull;
}

const JumpRegion* Hull::region(double r) const {
  for (const auto& j : jumps_) {
    const bool after_start = r > j.r_a || (start_fattened_ && &j == &jumps_.front() && r == r_start_);
    if (after_start && r < j.r_b) return &j;
  }
  return nullptr;
}

double Hull::area(double r) const {
  if (r < r_start_ || r > r_far_) throw DomainError("hull: r = " + std::to_string(r) + " outside the sweep");
  if (const JumpRegion* j = region(r)) return j->area;
  return area_at(metric_, r);
}

double Hull::attained_at(double r) const {
  if (r < r_start_ || r > r_far_) throw DomainError("hull: r = " + std::to_string(r) + " outside the sweep");
  if (const JumpRegion* j = region(r)) return j->r_b;
  return r;
}

bool Hull::fattened(double r) const { return region(r) != nullptr; }

TailMinimum tail_min_area(const RadialMetric& metric, double r, const HullOptions& options) {
  const Hull hull = Hull::compute(metric, r, options);
  return {hull.area(r), hull.attained_at(r)};
}

double FlowRecord::w(double r) const { return std::log(hull->area(r) / normalization); }

double FlowRecord::radius_at(double t) const {
  const double target = normalization * std::exp(t);
  if (!(target > 0.0) || !std::isfinite(target)) throw DomainError("radius_at: invalid time");
  double lo = hull->r_start();
  const auto& jumps = hull->jumps();
  for (std::size_t k = 0; k <= jumps.size(); ++k) {
    const double hi = k < jumps.size() ? jumps[k].r_a : hull->r_far();
    const double a_hi = area_at(metric, hi);
    if (k < jumps.size() && std::abs(target - jumps[k].area) <= 1e-13 * jumps[k].area) return jumps[k].r_b;
    if (target < a_hi || (k == jumps.size() && target == a_hi)) {
      const double a_lo = area_at(metric, lo);
      if (target <= a_lo) return lo;
      return numerics::find_root([&](double x) { return area_at(metric, x) - target; }, lo, hi);
    }
    if (k < jumps.size()) lo = jumps[k].r_b;
  }
  throw DomainError("radius_at: t = " + format_double(t) + " lies beyond the hull sweep (far radius " +
                    format_double(hull->r_far()) + ")");
}

double FlowRecord::volume_at(double t) const {
  const double r = radius_at(t);
  // Continue from the nearest recorded sample below r.
  auto it = std::upper_bound(samples.begin(), samples.end(), r,
                             [](double x, const FlowSample& s) { return x < s.r; });
  if (it == samples.begin()) return geometry::enclosed_volume(metric, metric.r_min(), r);
  --it;
  return it->volume + geometry::enclosed_volume(metric, it->r, r);
}

std::vector<FlowRow> FlowRecord::merged() const {
  std::vector<FlowRow> rows;
  rows.reserve(samples.size() + jumps.size());
  std::size_t j = 0;
  for (const FlowSample& s : samples) {
    while (j < jumps.size() && jumps[j].t < s.t) ++j;
    if (j < jumps.size() && jumps[j].t == s.t) {
      const FlowJump& jump = jumps[j];
      rows.push_back({{jump.t, jump.r_before, jump.area, jump.volume_before, jump.hawking_before}, true});
      rows.push_back({s, true});
      ++j;
    } else {
      rows.push_back({s, false});
    }
  }
  return rows;
}

namespace {

FlowRecord run_flow(const RadialMetric& metric, double r_start, FlowOrigin origin, const FlowOptions& options) {
  if (!(options.dt > 0.0)) throw DomainError("imcf: dt must be positive");
  auto hull = std::make_shared<const Hull>(Hull::compute(metric, r_start, options.hull));
  if (hull->fattened(r_start)) {
    throw PreconditionError("imcf: the start sphere at r = " + format_double(r_start) +
                            " is not outward minimizing (tail infimum below its area)");
  }
  FlowRecord flow{metric, hull, origin, r_start, 0.0, {}, {}};
  flow.normalization = origin == FlowOrigin::Pole ? 4.0 * pi : area_at(metric, r_start);

  const double t0 = origin == FlowOrigin::Pole ? options.t_min : 0.0;
  double t_end = options.t_max;
  if (std::isnan(t_end)) {
    const double r_stop = std::min(1e3 * std::max({1.0, metric.r_min(), r_start}), hull->r_far());
    t_end = flow.w(r_stop);
  }
  if (!(t_end > t0)) throw DomainError("imcf: flow horizon t_max must exceed the start time");
  const double t_far = flow.w(hull->r_far());
  if (t_end > t_far) {
    throw DomainError("imcf: t_max = " + format_double(t_end) + " exceeds the hull sweep (t <= " +
                      format_double(t_far) + "); enlarge the far radius");
  }

  std::vector<double> jump_times;
  std::vector<const JumpRegion*> jump_regions;
  for (const auto& j : hull->jumps()) {
    const double tj = std::log(j.area / flow.normalization);
    if (tj > t0 && tj <= t_end) {
      jump_times.push_back(tj);
      jump_regions.push_back(&j);
    }
  }
  std::vector<double> times;
  const auto steps = static_cast<long>(std::floor((t_end - t0) / options.dt + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    const double t = t0 + static_cast<double>(k) * options.dt;
    const bool clash = std::any_of(jump_times.begin(), jump_times.end(),
                                   [t](double tj) { return std::abs(t - tj) <= 1e-12 * std::max(1.0, std::abs(tj)); });
    if (!clash) times.push_back(t);
  }
  times.insert(times.end(), jump_times.begin(), jump_times.end());
  std::sort(times.begin(), times.end());

  const auto& q = options.quadrature;
  double r_prev = metric.r_min();
  double v_prev = 0.0;
  std::size_t next_jump = 0;
  for (double t : times) {
    FlowSample s;
    s.t = t;
    const bool at_jump = next_jump < jump_times.size() && t == jump_times[next_jump];
    if (at_jump) {
      const JumpRegion* region = jump_regions[next_jump];
      FlowJump jump;
      jump.t = t;
      jump.r_before = region->r_a;
      jump.r_after = region->r_b;
      jump.area = region->area;
      jump.volume_before = v_prev + geometry::enclosed_volume(metric, r_prev, region->r_a, q);
      jump.volume_after = jump.volume_before + geometry::enclosed_volume(metric, region->r_a, region->r_b, q);
      jump.hawking_before = geometry::hawking_mass(metric, region->r_a);
      jump.hawking_after = geometry::hawking_mass(metric, region->r_b);
      flow.jumps.push_back(jump);
      s.r = region->r_b;
      s.area = region->area;
      s.volume = jump.volume_after;
      s.hawking = jump.hawking_after;
      ++next_jump;
    } else {
      s.r = flow.radius_at(t);
      s.area = area_at(metric, s.r);
      s.volume = v_prev + geometry::enclosed_volume(metric, r_prev, s.r, q);
      s.hawking = geometry::hawking_mass(metric, s.r);
    }
    r_prev = s.r;
    v_prev = s.volume;
    flow.samples.push_back(s);
  }
  return flow;
}

}  // namespace

FlowRecord weak_imcf(const RadialMetric& metric, double r_start, const FlowOptions& options) {
  metric.require_in_domain(r_start, "weak_imcf");
  if (metric.areal(r_start).value == 0.0) {
    throw PreconditionError("weak_imcf: the start sphere degenerates to a point; use imcf_from_pole");
  }
  return run_flow(metric, r_start, FlowOrigin::Boundary, options);
}

FlowRecord imcf_from_pole(const RadialMetric& metric, const FlowOptions& options) {
  if (!metric.complete()) {
    throw PreconditionError("imcf_from_pole: metric '" + metric.description() + "' has a boundary at r = " +
                            format_double(metric.r_min()));
  }
  return run_flow(metric, 0.0, FlowOrigin::Pole, options);
}

double t_of_v(const FlowRecord& flow, double v) {
  if (!(v > 0.0)) throw DomainError("t_of_v: volume must be positive");
  if (flow.samples.empty()) throw DomainError("t_of_v: empty flow record");
  const double v_max = flow.samples.back().volume;
  if (v > v_max) {
    throw DomainError("t_of_v: volume " + format_double(v) + " beyond the recorded range (max " +
                      format_double(v_max) + "); increase the flow horizon t_max");
  }
  // First sample with volume >= v; the radius with |B_r| = v lies in the preceding cell,
  // and t(v) = w(r_v) also covers radii swallowed by a jump.
  auto it = std::lower_bound(flow.samples.begin(), flow.samples.end(), v,
                             [](const FlowSample& s, double x) { return s.volume < x; });
  double r_lo = flow.metric.r_min(), v_lo = 0.0;
  if (it != flow.samples.begin()) {
    r_lo = std::prev(it)->r;
    v_lo = std::prev(it)->volume;
  }
  const double r_hi = it->r;
  const auto& m = flow.metric;
  const double r_v = numerics::find_root(
      [&](double r) { return v_lo + geometry::enclosed_volume(m, r_lo, r) - v; }, r_lo, r_hi);
  return flow.w(r_v);
}

double geroch_derivative(const RadialMetric& metric, double r) {
  const double area = geometry::sphere_area(metric, r);
  const double scal = metric.has_conformal_factor() ? geometry::scalar_curvature_conformal(metric, r)
                                                    : geometry::scalar_curvature(metric, r);
  return std::sqrt(area) / std::pow(16.0 * pi, 1.5) * scal * area;
}

void write_csv(const FlowRecord& flow, std::ostream& out) {
  out << "t,r,area,volume,hawking,is_jump\n";
  for (const FlowRow& row : flow.merged()) {
    const auto& s = row.sample;
    out << format_double(s.t) << ',' << format_double(s.r) << ',' << format_double(s.area) << ','
        << format_double(s.volume) << ',' << format_double(s.hawking) << ',' << (row.is_jump ? 1 : 0) << '\n';
  }
}

std::string to_json(const FlowRecord& flow, int indent) {
  nlohmann::ordered_json j;
  j["metric"] = flow.metric.description();
  j["origin"] = flow.origin == FlowOrigin::Pole ? "pole" : "boundary";
  j["r_start"] = flow.r_start;
  j["normalization"] = flow.normalization;
  j["hull_far_radius"] = flow.hull->r_far();
  auto& jumps = j["jumps"] = nlohmann::ordered_json::array();
  for (const auto& jump : flow.jumps) {
    jumps.push_back({{"t", jump.t},
                     {"r_before", jump.r_before},
                     {"r_after", jump.r_after},
                     {"area", jump.area},
                     {"volume_before", jump.volume_before},
                     {"volume_after", jump.volume_after},
                     {"hawking_before", jump.hawking_before},
                     {"hawking_after", jump.hawking_after}});
  }
  auto& samples = j["samples"] = nlohmann::ordered_json::array();
  for (const auto& s : flow.samples) {
    samples.push_back({{"t", s.t}, {"r", s.r}, {"area", s.area}, {"volume", s.volume}, {"hawking", s.hawking}});
  }
  return j.dump(indent);
}

}  // namespace afmass::imcf
