#include "afmass/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "afmass/capacity.hpp"
#include "afmass/error.hpp"
#include "afmass/format.hpp"
#include "json.hpp"

namespace afmass::verify {

using std::numbers::pi;

std::string to_string(Status status) {
  switch (status) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
    case Status::Skipped: return "skipped";
    case Status::AssumptionViolated: return "assumption_violated";
    case Status::Informational: return "informational";
  }
  return "unknown";
}

void VerificationReport::add(std::vector<CheckEntry> entries) {
  for (auto& e : entries) checks.push_back(std::move(e));
  std::stable_sort(checks.begin(), checks.end(),
                   [](const CheckEntry& a, const CheckEntry& b) { return a.name < b.name; });
}

int VerificationReport::graded() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckEntry& e) {
    return e.status == Status::Pass || e.status == Status::Fail || e.status == Status::Inconclusive;
  }));
}

int VerificationReport::exit_code() const {
  bool inconclusive = false;
  for (const auto& e : checks) {
    if (e.status == Status::Fail) return 1;
    if (e.status == Status::Inconclusive) inconclusive = true;
  }
  return inconclusive ? 2 : 0;
}

double tolerance_for(const VerifyOptions& options, const std::string& entry, double fallback) {
  if (auto it = options.tolerances.find(entry); it != options.tolerances.end()) return it->second;
  const auto cut = entry.find_first_of(".[");
  if (cut != std::string::npos) {
    if (auto it = options.tolerances.find(entry.substr(0, cut)); it != options.tolerances.end()) return it->second;
  }
  return fallback;
}

imcf::FlowRecord default_flow(const RadialMetric& metric, const VerifyOptions& options) {
  if (metric.complete()) return imcf::imcf_from_pole(metric, options.flow);
  return imcf::weak_imcf(metric, metric.r_min(), options.flow);
}

namespace {

CheckEntry graded(const VerifyOptions& options, std::string name, double lhs, double rhs, double fallback_tol,
                  std::vector<std::string> assumptions = {}, std::string note = {}) {
  CheckEntry e;
  e.tolerance = tolerance_for(options, name, fallback_tol);
  e.name = std::move(name);
  e.lhs = lhs;
  e.rhs = rhs;
  e.margin = rhs - lhs;
  e.status = (std::isfinite(e.margin) && e.margin >= -e.tolerance) ? Status::Pass : Status::Fail;
  e.assumptions = std::move(assumptions);
  e.note = std::move(note);
  return e;
}

CheckEntry equality(const VerifyOptions& options, std::string name, double a, double b, double fallback_tol,
                    std::vector<std::string> assumptions = {}, std::string note = {}) {
  return graded(options, std::move(name), std::abs(a - b), 0.0, fallback_tol, std::move(assumptions),
                std::move(note));
}

CheckEntry ungraded(std::string name, Status status, std::string note) {
  CheckEntry e;
  e.name = std::move(name);
  e.status = status;
  e.lhs = e.rhs = e.margin = std::numeric_limits<double>::quiet_NaN();
  e.note = std::move(note);
  return e;
}

/// The tail of an extrapolation is trusted unless it turns back by more than a tenth of tol.
bool tail_trusted(const masses::MassEstimate& est, double tol) {
  if (!est.extrapolation) return false;
  if (est.extrapolation->monotone_tail) return true;
  const auto& s = est.samples;
  const std::size_t m = s.size();
  const double lo = std::min({s[m - 3].value, s[m - 2].value, s[m - 1].value});
  const double hi = std::max({s[m - 3].value, s[m - 2].value, s[m - 1].value});
  return hi - lo <= 0.1 * tol;
}

bool tail_trusted(const numerics::ExtrapolationResult& x, double tol) {
  masses::MassEstimate est;
  est.samples = x.raw;
  est.extrapolation = x;
  return tail_trusted(est, tol);
}

CheckEntry mark_tail(CheckEntry e, bool trusted) {
  if (trusted) return e;
  if (e.status == Status::Pass) e.status = Status::Inconclusive;
  e.note += e.note.empty() ? "non-monotone extrapolation tail" : "; non-monotone extrapolation tail";
  return e;
}

double far_radius(const RadialMetric& metric, double hint) {
  return std::min(metric.r_max(), std::max(hint, 1e3 * std::max(1.0, metric.r_min())));
}

struct Gate {
  bool ok = true;
  std::string note;
};

Gate scalar_gate(const RadialMetric& metric, double hi) {
  const double lo = metric.r_min();
  const auto scan = geometry::scan_scalar_curvature(metric, lo, std::min(metric.r_max(), std::max(hi, lo + 1.0)));
  if (scan.nonnegative) return {};
  return {false, "Scal = " + format_double(scan.min_scalar) + " < 0 at r = " + format_double(scan.at_r)};
}

double scalar(const RadialMetric& metric, double r) {
  return metric.has_conformal_factor() ? geometry::scalar_curvature_conformal(metric, r)
                                       : geometry::scalar_curvature(metric, r);
}

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

std::string bracket(const std::string& base, std::initializer_list<std::pair<const char*, double>> params) {
  std::string s = base + "[";
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) s += ",";
    s += std::string(k) + "=" + format_double(v);
    first = false;
  }
  return s + "]";
}

const std::vector<std::string> kScal{"Scal >= 0 on samples"};

}  // namespace

std::vector<CheckEntry> check_penrose(const RadialMetric& metric, const VerifyOptions& options) {
  if (metric.complete()) return {ungraded("penrose", Status::Skipped, "no horizon")};
  if (!metric.boundary_minimal()) return {ungraded("penrose", Status::AssumptionViolated, "boundary not minimal")};
  if (metric.has_non_outward_minimizing_region()) {
    return {ungraded("penrose", Status::AssumptionViolated, "coordinate spheres not outward minimizing")};
  }
  const Gate gate = scalar_gate(metric, options.mass_ladder.back());
  if (!gate.ok) return {ungraded("penrose", Status::AssumptionViolated, gate.note)};

  const std::vector<std::string> used{"Scal >= 0 on samples", "minimal boundary", "outward minimizing spheres"};
  const double lhs = std::sqrt(geometry::sphere_area(metric, metric.r_min()) / (16.0 * pi));
  const auto iso = masses::iso_mass_limit(metric, options.mass_ladder);
  const double tol = tolerance_for(options, "penrose", 1e-4);
  std::vector<CheckEntry> out;
  out.push_back(mark_tail(graded(options, "penrose", lhs, iso.limit(), 1e-4, used, iso.label), tail_trusted(iso, tol)));

  if (std::abs(lhs - iso.limit()) < tol) {
    // Scal == 0 on the scan grid, scaled by the sphere curvature 2/areal^2.
    double worst = 0.0;
    for (double r : geometric(metric.r_min(), far_radius(metric, options.mass_ladder.back()), 400)) {
      const double rho = metric.areal(r).value;
      worst = std::max(worst, std::abs(scalar(metric, r)) * rho * rho / 2.0);
    }
    out.push_back(graded(options, "penrose.rigidity", worst, 0.0, 1e-9, used,
                         "equality case: Scal == 0 on the sample grid (rigidity proxy)"));
  } else {
    out.push_back(ungraded("penrose.rigidity", Status::Informational, "strict inequality"));
  }
  return out;
}

std::vector<CheckEntry> check_geroch(const RadialMetric& metric, const imcf::FlowRecord& flow,
                                     const VerifyOptions& options) {
  const Gate gate = scalar_gate(metric, flow.samples.back().r);
  if (!gate.ok) return {ungraded("geroch", Status::AssumptionViolated, gate.note)};

  std::vector<CheckEntry> out;
  const auto rows = flow.merged();
  double min_step = std::numeric_limits<double>::infinity(), scale = 1.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    scale = std::max(scale, std::abs(rows[i].sample.hawking));
    if (i > 0) min_step = std::min(min_step, rows[i].sample.hawking - rows[i - 1].sample.hawking);
  }
  out.push_back(graded(options, "geroch.monotone", 0.0, min_step, 1e-10 * scale, kScal,
                       "smallest Hawking mass increment across " + std::to_string(rows.size()) + " rows"));

  const double h = 1e-3;
  const double t0 = flow.samples.front().t, t1 = flow.samples.back().t;
  double worst = 0.0;
  int used = 0;
  for (int k = 0; k < 20; ++k) {
    const double t = t0 + 3.0 * h + (t1 - t0 - 6.0 * h) * (k + 0.5) / 20.0;
    const bool near_jump = std::any_of(flow.jumps.begin(), flow.jumps.end(),
                                       [&](const imcf::FlowJump& j) { return std::abs(j.t - t) < 3.0 * h; });
    if (near_jump) continue;
    const double plus = geometry::hawking_mass(metric, flow.radius_at(t + h));
    const double minus = geometry::hawking_mass(metric, flow.radius_at(t - h));
    const double slope = (plus - minus) / (2.0 * h);
    const double analytic = imcf::geroch_derivative(metric, flow.radius_at(t));
    worst = std::max(worst, std::abs(slope - analytic) / std::max(1.0, std::abs(slope)));
    ++used;
  }
  out.push_back(graded(options, "geroch.derivative", worst, 0.0, 1e-4, kScal,
                       "finite differences at " + std::to_string(used) + " times"));
  return out;
}

std::vector<CheckEntry> check_shi(const RadialMetric& metric, const VerifyOptions& options) {
  if (!metric.complete()) return {ungraded("shi", Status::Skipped, "metric has a boundary")};
  const auto flow = imcf::imcf_from_pole(metric, options.flow);
  const Gate gate = scalar_gate(metric, flow.samples.back().r);
  if (!gate.ok) return {ungraded("shi", Status::AssumptionViolated, gate.note)};

  const std::vector<std::string> used{"complete", "Scal >= 0 on samples"};
  std::vector<CheckEntry> out;
  const double v_lo = std::max(flow.samples.front().volume, 1e-2);
  const double v_hi = std::min(flow.samples.back().volume, 1e2);
  CheckEntry worst;
  bool have = false;
  for (double v : geometric(v_lo, v_hi, options.volume_points)) {
    const double t = imcf::t_of_v(flow, v);
    const double area = geometry::sphere_area(metric, flow.radius_at(t));
    const double bound = std::cbrt(36.0 * pi) * std::pow(v, 2.0 / 3.0);
    auto e = graded(options, "shi.isoperimetric", area, bound, 1e-9, used);
    if (!have || e.margin < worst.margin) {
      worst = e;
      worst.note = "worst of " + std::to_string(options.volume_points) + " volumes, at v = " + format_double(v);
      have = true;
    }
  }
  out.push_back(worst);

  double max_w = 0.0;
  for (const auto& s : flow.samples) {
    if (s.r <= 0.0) continue;
    const double H = geometry::mean_curvature(metric, s.r);
    max_w = std::max(max_w, s.area * H * H);
  }
  out.push_back(graded(options, "shi.reverse_willmore", max_w, 16.0 * pi, 16.0 * pi * 1e-9, used,
                       "largest Willmore energy along the pole flow"));
  return out;
}

std::vector<CheckEntry> check_asymptotic_comparison(const RadialMetric& metric, const imcf::FlowRecord& flow,
                                                    const VerifyOptions& options) {
  const Gate gate = scalar_gate(metric, std::max(flow.samples.back().r, options.mass_ladder.back()));
  if (!gate.ok) return {ungraded("asymptotic_comparison", Status::AssumptionViolated, gate.note)};

  std::vector<CheckEntry> out;
  double worst = 0.0;
  for (const auto& s : flow.samples) {
    if (s.r <= 0.0) continue;
    const double H = geometry::mean_curvature(metric, s.r);
    const double W = s.area * H * H;
    if (W < 1e-12) continue;
    const double q = std::sqrt(W / (16.0 * pi));
    const double holder = 2.0 * std::sqrt(s.area / W) * (1.0 - q);
    const double hawking = 2.0 * geometry::hawking_mass_from(s.area, W) / (q + q * q);
    worst = std::max(worst, std::abs(holder - hawking) / std::max(1.0, std::abs(holder)));
  }
  out.push_back(graded(options, "asymptotic_comparison.identity", worst, 0.0, 1e-10, {},
                       "Hoelder form against the Hawking-mass form at every flow sample"));

  const auto h = masses::hawking_mass_limit(metric, options.mass_ladder);
  const auto iso = masses::iso_mass_limit(metric, options.mass_ladder);
  const double tol = tolerance_for(options, "asymptotic_comparison.tail", 1e-3);
  out.push_back(mark_tail(graded(options, "asymptotic_comparison.tail", h.limit(), iso.limit(), 1e-3, kScal,
                                 "extrapolated Hawking mass against the extrapolated iso quotient"),
                          tail_trusted(h, tol) && tail_trusted(iso, tol)));
  return out;
}

std::vector<CheckEntry> check_profile_chain(const RadialMetric& metric, const VerifyOptions& options) {
  const double base = std::max(1.0, metric.r_min());
  const double hi = std::min(metric.r_max(), 1e7 * base);
  const double lo = 1e3 * base;
  if (!(hi >= 100.0 * lo)) return {ungraded("profile_chain", Status::Skipped, "domain too short for the volume tail")};

  std::vector<numerics::ScaleValue> left, right, energy;
  double pointwise = std::numeric_limits<double>::infinity();
  const auto radii = geometric(lo, hi, 9);
  for (double r : radii) {
    const double V = geometry::enclosed_volume(metric, metric.r_min(), r, {});
    const auto P = geometry::radial_profile(metric, V, {});
    const double I = P.area, dI = P.derivative;
    const double iso = 2.0 * geometry::isoperimetric_deficit(metric, P.r, {1e-12}) / I;
    const double chain = 32.0 * pi * geometry::hawking_mass(metric, P.r) / (4.0 * std::sqrt(pi) * dI * std::sqrt(I) + dI * dI * I);
    const double s = std::sqrt(I / (4.0 * pi));
    left.push_back({s, iso});
    right.push_back({s, chain});
    energy.push_back({s, dI * dI * I});
    if (r >= hi / 10.0) pointwise = std::min(pointwise, chain - iso);
  }
  const auto L = numerics::extrapolate_limit(left, 2);
  const auto R = numerics::extrapolate_limit(right, 2);
  const auto E = numerics::extrapolate_limit(energy, 2);

  std::vector<CheckEntry> out;
  const double tol = tolerance_for(options, "profile_chain.limit", 1e-6);
  out.push_back(mark_tail(graded(options, "profile_chain.limit", L.limit, R.limit, 1e-6, {},
                                 "extrapolated iso quotient against the extrapolated Hawking chain"),
                          tail_trusted(L, tol) && tail_trusted(R, tol)));
  auto point = ungraded("profile_chain.pointwise", Status::Informational,
                        "smallest finite-volume margin on the last decade; only the limits are compared");
  point.margin = pointwise;
  out.push_back(point);
  out.push_back(equality(options, "profile_chain.i_prime_squared_i", E.limit, 16.0 * pi, 1e-3, {},
                         "extrapolated I'^2 I against 16 pi"));
  return out;
}

std::vector<CheckEntry> check_mass_equivalence(const RadialMetric& metric, const VerifyOptions& options) {
  std::vector<std::pair<std::string, masses::MassEstimate>> est;
  est.emplace_back("iso", masses::iso_mass_limit(metric, options.mass_ladder));
  est.emplace_back("hawking_limit", masses::hawking_mass_limit(metric, options.mass_ladder));
  est.emplace_back("adm", masses::adm_mass_limit(masses::ChartMetric::from_radial(metric), options.mass_ladder));
  for (double p : options.p_values) {
    est.emplace_back(bracket("p_iso", {{"p", p}}), masses::p_iso_mass_limit(metric, p, options.mass_ladder));
    est.emplace_back(bracket("p_iso_alt", {{"p", p}}), masses::p_iso_mass_alt_limit(metric, p, options.mass_ladder));
  }

  std::vector<CheckEntry> out;
  const double spread_tol = tolerance_for(options, "mass_equivalence.spread", 2e-3);
  const double side_tol = tolerance_for(options, "mass_equivalence.p_iso_le_iso", 1e-3);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  bool trusted = true;
  for (const auto& [name, e] : est) {
    auto info = ungraded("mass_equivalence.estimate." + name, Status::Informational, e.label);
    info.lhs = e.limit();
    out.push_back(info);
    lo = std::min(lo, e.limit());
    hi = std::max(hi, e.limit());
    trusted = trusted && tail_trusted(e, spread_tol);
  }

  const Gate gate = scalar_gate(metric, options.mass_ladder.back());
  if (gate.ok) {
    out.push_back(mark_tail(graded(options, "mass_equivalence.spread", hi - lo, 0.0, 2e-3, kScal,
                                   "largest pairwise gap among the extrapolated estimates"),
                            trusted));
  } else {
    out.push_back(ungraded("mass_equivalence.spread", Status::AssumptionViolated, gate.note));
  }

  const auto& iso = est.front().second;
  for (const auto& [name, e] : est) {
    if (name.rfind("p_iso", 0) != 0) continue;
    out.push_back(mark_tail(graded(options, "mass_equivalence." + name + "_le_iso", e.limit(), iso.limit(), side_tol),
                            tail_trusted(e, side_tol) && tail_trusted(iso, side_tol)));
  }
  return out;
}

namespace {

std::vector<double> resolved_spheres(const RadialMetric& metric, const VerifyOptions& options) {
  std::vector<double> radii = options.sphere_ladder;
  if (radii.empty()) {
    radii = {0.5, 1.0, 2.0, 5.0, 10.0};
    if (!metric.complete()) radii.push_back(metric.r_min());
  }
  std::vector<double> out;
  for (double r : radii) {
    if (r > 0.0 && r >= metric.r_min() && r <= metric.r_max()) out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<CheckEntry> check_bray_miao(const RadialMetric& metric, const VerifyOptions& options) {
  const auto spheres = resolved_spheres(metric, options);
  if (spheres.empty()) return {ungraded("bray_miao", Status::Skipped, "no sphere inside the domain")};
  const Gate gate = scalar_gate(metric, far_radius(metric, spheres.back()));
  if (!gate.ok) return {ungraded("bray_miao", Status::AssumptionViolated, gate.note)};

  std::vector<CheckEntry> out;
  capacity::CapacityOptions copt;
  copt.check_minimality = false;
  copt.potential_samples = 2;
  const bool euclidean = metric.kind() == geometry::MetricKind::Euclidean;
  const bool schwarzschild = metric.kind() == geometry::MetricKind::Schwarzschild;
  for (double p : options.p_values) {
    for (double r : spheres) {
      const auto d = geometry::sphere_data(metric, r);
      const std::string name = bracket("bray_miao", {{"p", p}, {"r", r}});
      if (d.willmore > 16.0 * pi * (1.0 + 1e-12)) {
        out.push_back(ungraded(name, Status::Skipped, "Willmore energy above 16 pi"));
        continue;
      }
      const double cap = capacity::p_capacity_radial(metric, r, p, copt).ncap;
      const double bound = capacity::bray_miao_bound(d.area, d.willmore, p);
      out.push_back(graded(options, name, cap, bound, 1e-9 * bound, kScal, "ncap against the hypergeometric bound"));
      if (euclidean) {
        out.push_back(equality(options, bracket("bray_miao.equality", {{"p", p}, {"r", r}}), cap, bound, 1e-9,
                               {}, "Euclidean model equality"));
      }
      if (schwarzschild && p == 2.0 && r == metric.r_min()) {
        out.push_back(equality(options, bracket("bray_miao.equality", {{"p", p}, {"r", r}}), cap, bound, 1e-8,
                               {}, "horizon equality"));
      }
    }
  }
  return out;
}

std::vector<CheckEntry> check_profile_monotonicity(const RadialMetric& metric, const VerifyOptions& options) {
  if (metric.has_non_outward_minimizing_region()) {
    return {ungraded("profile_monotonicity", Status::Informational,
                     "radial profile not isoperimetric in non-outward-minimizing regions")};
  }
  const double base = std::max(1.0, metric.r_min());
  const double r_lo = metric.r_min() + 0.05 * base;
  const double r_hi = std::min(metric.r_max(), 1e3 * base);
  const double v_lo = geometry::enclosed_volume(metric, metric.r_min(), r_lo, {});
  const double v_hi = geometry::enclosed_volume(metric, metric.r_min(), r_hi, {});

  double min_growth = std::numeric_limits<double>::infinity(), min_h = min_growth, worst_fd = 0.0;
  double prev = 0.0;
  bool first = true;
  for (double V : geometric(v_lo, v_hi, options.profile_points)) {
    const auto P = geometry::radial_profile(metric, V, {});
    if (!first) min_growth = std::min(min_growth, (P.area - prev) / prev);
    prev = P.area;
    first = false;
    min_h = std::min(min_h, P.derivative);
    const double h = 1e-4 * V;
    const double fd = (geometry::radial_profile(metric, V + h, {}).area -
                       geometry::radial_profile(metric, V - h, {}).area) /
                      (2.0 * h);
    worst_fd = std::max(worst_fd, std::abs(fd - P.derivative) / std::abs(P.derivative));
  }

  std::vector<CheckEntry> out;
  auto strict = [&](std::string name, double value, std::string note) {
    auto e = graded(options, std::move(name), 0.0, value, 0.0, {"outward minimizing spheres"}, std::move(note));
    if (!(value > 0.0)) e.status = Status::Fail;
    return e;
  };
  out.push_back(strict("profile_monotonicity.increasing", min_growth, "smallest relative area increment"));
  out.push_back(strict("profile_monotonicity.mean_curvature", min_h, "smallest H(r(V)) on the ladder"));
  out.push_back(graded(options, "profile_monotonicity.derivative", worst_fd, 0.0, 1e-5, {},
                       "relative gap between H(r(V)) and central differences of I(V)"));
  return out;
}

VerificationReport run_all(const RadialMetric& metric, const VerifyOptions& options) {
  VerificationReport report;
  report.metric = metric.description();
  report.mass_ladder = options.mass_ladder;
  report.sphere_ladder = resolved_spheres(metric, options);
  report.p_values = options.p_values;

  auto guarded = [&](const std::string& name, const std::function<std::vector<CheckEntry>()>& run) {
    try {
      report.add(run());
    } catch (const PreconditionError& e) {
      report.add({ungraded(name, Status::AssumptionViolated, e.what())});
    } catch (const ConvergenceError& e) {
      report.add({ungraded(name, Status::Inconclusive, e.what())});
    } catch (const Error& e) {
      report.add({ungraded(name, Status::Fail, e.what())});
    }
  };

  std::optional<imcf::FlowRecord> flow;
  std::string flow_error;
  Status flow_status = Status::Fail;
  try {
    flow = default_flow(metric, options);
  } catch (const PreconditionError& e) {
    flow_error = e.what();
    flow_status = Status::AssumptionViolated;
  } catch (const Error& e) {
    flow_error = e.what();
  }

  guarded("penrose", [&] { return check_penrose(metric, options); });
  if (flow) {
    guarded("geroch", [&] { return check_geroch(metric, *flow, options); });
    guarded("asymptotic_comparison", [&] { return check_asymptotic_comparison(metric, *flow, options); });
  } else {
    report.add({ungraded("geroch", flow_status, flow_error),
                ungraded("asymptotic_comparison", flow_status, flow_error)});
  }
  guarded("shi", [&] { return check_shi(metric, options); });
  guarded("profile_chain", [&] { return check_profile_chain(metric, options); });
  guarded("mass_equivalence", [&] { return check_mass_equivalence(metric, options); });
  guarded("bray_miao", [&] { return check_bray_miao(metric, options); });
  guarded("profile_monotonicity", [&] { return check_profile_monotonicity(metric, options); });
  return report;
}

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string to_json(const VerificationReport& report, const ReportMetadata& metadata, int indent) {
  nlohmann::ordered_json j;
  auto& meta = j["metadata"];
  meta["tool_version"] = kToolVersion;
  meta["metric"] = report.metric;
  meta["ladders"] = {{"mass", report.mass_ladder}, {"spheres", report.sphere_ladder}, {"p", report.p_values}};
  meta["seeds"] = nlohmann::ordered_json::array();
  meta["exhaustion"] = "coordinate spheres (radial-exhaustion estimate)";
  meta["extrapolation_model"] = "least squares in 1/scale";
  if (!metadata.config_hash.empty()) meta["config_hash"] = metadata.config_hash;
  if (!metadata.generated_at.empty()) meta["generated_at"] = metadata.generated_at;

  std::map<std::string, int> counts;
  for (const auto& e : report.checks) ++counts[to_string(e.status)];
  j["summary"] = {{"graded", report.graded()}, {"exit_code", report.exit_code()}, {"statuses", counts}};

  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& e : report.checks) {
    checks.push_back({{"name", e.name},
                      {"status", to_string(e.status)},
                      {"lhs", number(e.lhs)},
                      {"rhs", number(e.rhs)},
                      {"margin", number(e.margin)},
                      {"tolerance", e.tolerance},
                      {"assumptions", e.assumptions},
                      {"note", e.note}});
  }
  return j.dump(indent);
}

std::string to_text(const VerificationReport& report) {
  std::vector<std::array<std::string, 6>> rows{{"check", "status", "lhs", "rhs", "margin", "tol"}};
  for (const auto& e : report.checks) {
    rows.push_back({e.name, to_string(e.status), format_double(e.lhs), format_double(e.rhs), format_double(e.margin),
                    format_double(e.tolerance)});
  }
  std::array<std::size_t, 6> width{};
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  out << "metric: " << report.metric << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 6; ++c) {
      out << row[c];
      if (c + 1 < 6) out << std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << '\n';
  }
  out << "exit code " << report.exit_code() << " (" << report.graded() << " graded entries)\n";
  return out.str();
}

}  // namespace afmass::verify
