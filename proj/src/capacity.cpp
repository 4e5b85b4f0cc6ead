#include "afmass/capacity.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "afmass/error.hpp"
#include "afmass/format.hpp"
#include "afmass/hypergeometric.hpp"
#include "json.hpp"

namespace afmass::capacity {

using std::numbers::pi;

namespace {

void require_exponent(double p, double upper) {
  if (!(p > 1.0 && p <= upper + 1e-12) || !std::isfinite(p)) {
    throw DomainError("capacity: exponent p = " + format_double(p) + " outside (1, " + format_double(upper) + "]");
  }
}

double integrand(const RadialMetric& m, double r, double exponent) {
  return m.lapse(r).value * std::pow(m.areal(r).value, exponent);
}

}  // namespace

numerics::QuadratureResult tail_integral(const RadialMetric& metric, double r0, double p,
                                         const numerics::QuadratureOptions& options) {
  require_exponent(p, kMaxExponent);
  metric.require_in_domain(r0, "tail_integral");
  if (!(metric.areal(r0).value > 0.0)) throw DomainError("tail_integral: degenerate sphere at r0");
  const double exponent = -2.0 / (p - 1.0);
  const bool tabulated = std::isfinite(metric.r_max());
  const double r_end = tabulated ? metric.r_max() : kTailRadius * std::max(1.0, r0);

  // Decade pieces in x = log r; the integrand decays like exp(-(3-p)/(p-1) x) there.
  numerics::QuadratureResult total;
  std::vector<double> pieces;
  for (double lo = r0; lo < r_end;) {
    const double hi = std::min(10.0 * lo, r_end);
    auto g = [&metric, exponent](double x) {
      const double r = std::exp(x);
      return integrand(metric, r, exponent) * r;
    };
    const auto piece = numerics::integrate(g, std::log(lo), std::log(hi), options);
    pieces.push_back(piece.value);
    total.value += piece.value;
    total.error += piece.error;
    total.evaluations += piece.evaluations;
    total.subdivisions += piece.subdivisions;
    lo = hi;
  }
  if (!tabulated) {
    const double last = pieces.back(), before = pieces[pieces.size() - 2];
    if (!(last < (1.0 - 1e-3) * before)) {
      throw DivergenceError("tail_integral: decade contributions do not decay (p-parabolic end)", total.value,
                            std::numeric_limits<double>::infinity());
    }
    // |grad areal| = areal'/lapse tends to 1 on an asymptotically flat end, in any radial chart.
    const double flat = std::abs(metric.areal(r_end).d1 / metric.lapse(r_end).value - 1.0);
    if (flat > 1e-3) {
      throw PreconditionError("tail_integral: end not asymptotically flat at r = " + format_double(r_end));
    }
  }
  // Euclidean continuation in arc length: d areal = lapse dr beyond r_end.
  const double rho_end = metric.areal(r_end).value;
  total.value += (p - 1.0) / (3.0 - p) * std::pow(rho_end, -(3.0 - p) / (p - 1.0));
  return total;
}

CapacitySolution p_capacity_radial(const RadialMetric& metric, double r0, double p, const CapacityOptions& options) {
  const auto tail = tail_integral(metric, r0, p, options.quadrature);
  CapacitySolution s;
  s.p = p;
  s.r0 = r0;
  s.tail_integral = tail.value;
  s.tail_error = tail.error;
  s.ncap = std::pow((3.0 - p) / (p - 1.0) * tail.value, -(p - 1.0));
  s.energy = 4.0 * pi * std::pow(tail.value, 1.0 - p);

  const double r_end = std::min(options.potential_extent * std::max(1.0, r0), metric.r_max());
  const int n = std::max(2, options.potential_samples);
  s.potential.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double r = (k == 0) ? r0 : (k == n - 1 ? r_end : r0 * std::pow(r_end / r0, double(k) / (n - 1)));
    const double u = (k == 0) ? 1.0 : tail_integral(metric, r, p, options.quadrature).value / tail.value;
    s.potential.push_back({r, u});
  }

  if (options.check_minimality) {
    const double scale = std::max(1.0, r0);
    const struct {
      double eps, offset, width;
    } bumps[] = {{0.1, 0.5, 0.5}, {-0.05, 1.0, 1.0}, {0.02, 2.0, 3.0}};
    s.minimality_verified = true;
    for (const auto& b : bumps) {
      const double center = r0 + b.offset * scale;
      const double width = b.width * scale;
      if (center + 0.5 * width > metric.r_max()) continue;
      const double gain = competitor_energy_gain(metric, s, b.eps, center, width);
      s.competitors.push_back({b.eps, center, width, gain});
      if (gain < -1e-12 * s.energy) s.minimality_verified = false;
    }
  }
  return s;
}

double competitor_energy_gain(const RadialMetric& metric, const CapacitySolution& solution, double epsilon,
                              double center, double width) {
  const double a = center - 0.5 * width;
  if (!(a >= solution.r0) || !(width > 0.0)) throw DomainError("competitor: bump must lie outside S_{r0}");
  const double p = solution.p;
  const double exponent = -2.0 / (p - 1.0);
  const double T = solution.tail_integral;
  auto gain_density = [&](double r) {
    const double phi = metric.lapse(r).value;
    const double rho = metric.areal(r).value;
    const double du = -phi * std::pow(rho, exponent) / T;
    const double db = pi / width * std::sin(2.0 * pi * (r - a) / width);
    const double weight = std::pow(phi, 1.0 - p) * rho * rho;
    // The linear term integrates to zero over the bump: |du|^{p-1} weight is the constant T^{1-p}.
    const double linear = -p * std::pow(T, 1.0 - p) * epsilon * db;
    return 4.0 * pi * ((std::pow(std::abs(du + epsilon * db), p) - std::pow(std::abs(du), p)) * weight - linear);
  };
  return numerics::integrate(gain_density, a, a + width, {1e-10, 1e-14 * solution.energy}).value;
}

double bray_miao_bound(double area, double willmore, double p) {
  require_exponent(p, 3.0 - 1e-15);
  if (!(area > 0.0)) throw DomainError("bray_miao_bound: area must be positive");
  const double full = 16.0 * pi;
  double z = 1.0 - willmore / full;
  if (z < 0.0 && z > -1e-12) z = 0.0;
  if (z > 1.0 && z < 1.0 + 1e-12) z = 1.0;
  if (z < 0.0) {
    throw DomainError("bray_miao_bound: willmore energy " + format_double(willmore) +
                      " > 16 pi, outside reverse-Willmore regime");
  }
  if (z > 1.0) throw DomainError("bray_miao_bound: willmore energy must be nonnegative");
  const double f = numerics::hyp2f1(0.5, (3.0 - p) / (p - 1.0), 2.0 / (p - 1.0), z);
  return std::pow(area / (4.0 * pi), 0.5 * (3.0 - p)) * std::pow(f, -(p - 1.0));
}

std::string to_json(const CapacitySolution& s, int indent) {
  nlohmann::ordered_json j;
  j["p"] = s.p;
  j["r0"] = s.r0;
  j["ncap"] = s.ncap;
  j["tail_integral"] = s.tail_integral;
  j["tail_error"] = s.tail_error;
  j["energy"] = s.energy;
  j["minimality_verified"] = s.minimality_verified;
  auto& comp = j["competitors"] = nlohmann::ordered_json::array();
  for (const auto& c : s.competitors) {
    comp.push_back({{"epsilon", c.epsilon}, {"center", c.center}, {"width", c.width}, {"energy_gain", c.energy_gain}});
  }
  auto& pot = j["potential"] = nlohmann::ordered_json::array();
  for (const auto& sample : s.potential) pot.push_back({{"r", sample.r}, {"u", sample.u}});
  return j.dump(indent);
}

void write_potential_csv(const CapacitySolution& s, std::ostream& out) {
  out << "r,u\n";
  for (const auto& sample : s.potential) out << format_double(sample.r) << ',' << format_double(sample.u) << '\n';
}

}  // namespace afmass::capacity
