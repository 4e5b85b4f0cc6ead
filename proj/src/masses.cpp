#include "afmass/masses.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/LU>
#include <boost/math/special_functions/legendre.hpp>

#include "afmass/capacity.hpp"
#include "afmass/error.hpp"
#include "afmass/format.hpp"
#include "afmass/parallel.hpp"
#include "json.hpp"

namespace afmass::masses {

using std::numbers::pi;

std::string to_string(MassKind kind) {
  switch (kind) {
    case MassKind::Iso: return "iso";
    case MassKind::PIso: return "p_iso";
    case MassKind::PIsoAlt: return "p_iso_alt";
    case MassKind::Adm: return "adm";
    case MassKind::HawkingLimit: return "hawking_limit";
  }
  return "unknown";
}

double MassEstimate::limit() const {
  if (extrapolation) return extrapolation->limit;
  if (samples.empty()) throw DomainError("mass estimate without samples");
  return samples.back().value;
}

double iso_mass_quotient(double volume, double area) {
  if (!(area > 0.0) || !(volume >= 0.0)) throw DomainError("iso_mass_quotient: need area > 0 and volume >= 0");
  return 2.0 / area * (volume - std::pow(area, 1.5) / (6.0 * std::sqrt(pi)));
}

namespace {

void require_p(double p) {
  if (!(p > 1.0 && p < 3.0)) throw DomainError("p-isocapacitary quotient: p = " + format_double(p) + " outside (1, 3)");
}

}  // namespace

double p_iso_mass_quotient(double volume, double ncap, double p) {
  require_p(p);
  if (!(ncap > 0.0)) throw DomainError("p_iso_mass_quotient: ncap must be positive");
  return (volume - 4.0 * pi / 3.0 * std::pow(ncap, 3.0 / (3.0 - p))) / (2.0 * p * pi * std::pow(ncap, 2.0 / (3.0 - p)));
}

double p_iso_mass_alt_quotient(double volume, double ncap, double p) {
  require_p(p);
  if (!(ncap > 0.0)) throw DomainError("p_iso_mass_alt_quotient: ncap must be positive");
  return 2.0 * std::pow(ncap, (p - 2.0) / (3.0 - p)) / (p * (3.0 - p)) *
         (std::pow(3.0 * volume / (4.0 * pi), (3.0 - p) / 3.0) - ncap);
}

namespace {

void validate_ladder(const RadialMetric& metric, const std::vector<double>& radii) {
  if (radii.empty()) throw DomainError("mass ladder is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    metric.require_in_domain(radii[i], "mass ladder");
    if (!(radii[i] > metric.r_min())) throw DomainError("mass ladder radii must exceed r_min");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("mass ladder must be strictly increasing");
  }
}

MassAssumptions assumptions_for(const RadialMetric& metric, double r_hi) {
  MassAssumptions a;
  const double lo = metric.r_min();
  const auto scan = geometry::scan_scalar_curvature(metric, lo, std::max(r_hi, lo + 1.0), 400);
  a.scalar_nonnegative = scan.nonnegative;
  a.min_scalar = scan.min_scalar;
  a.boundary_minimal = metric.boundary_minimal();
  return a;
}

MassEstimate ladder_estimate(MassKind kind, double p, const RadialMetric& metric, const std::vector<double>& radii,
                             const LadderOptions& options, const std::function<double(double)>& value_at) {
  validate_ladder(metric, radii);
  MassEstimate est;
  est.kind = kind;
  est.p = p;
  const auto values = parallel_map<double>(radii.size(), [&](std::size_t i) { return value_at(radii[i]); });
  for (std::size_t i = 0; i < radii.size(); ++i) est.samples.push_back({radii[i], values[i]});
  if (est.samples.size() >= 4) est.extrapolation = numerics::extrapolate_limit(est.samples, options.order);
  est.assumptions = assumptions_for(metric, radii.back());
  return est;
}

double volume_from_deficit(const RadialMetric& metric, double r, const numerics::QuadratureOptions& q) {
  const double rho = metric.areal(r).value;
  return geometry::isoperimetric_deficit(metric, r, q) + 4.0 * pi / 3.0 * rho * rho * rho;
}

double capacity_at(const RadialMetric& metric, double r, double p, const numerics::QuadratureOptions& q) {
  capacity::CapacityOptions opt;
  opt.quadrature = q;
  opt.potential_samples = 2;
  opt.check_minimality = false;
  return capacity::p_capacity_radial(metric, r, p, opt).ncap;
}

}  // namespace

MassEstimate iso_mass_limit(const RadialMetric& metric, const std::vector<double>& radii, const LadderOptions& options) {
  return ladder_estimate(MassKind::Iso, 0.0, metric, radii, options, [&](double r) {
    const double area = geometry::sphere_area(metric, r);
    return 2.0 / area * geometry::isoperimetric_deficit(metric, r, options.quadrature);
  });
}

MassEstimate p_iso_mass_limit(const RadialMetric& metric, double p, const std::vector<double>& radii,
                              const LadderOptions& options) {
  require_p(p);
  return ladder_estimate(MassKind::PIso, p, metric, radii, options, [&](double r) {
    return p_iso_mass_quotient(volume_from_deficit(metric, r, options.quadrature),
                               capacity_at(metric, r, p, options.quadrature), p);
  });
}

MassEstimate p_iso_mass_alt_limit(const RadialMetric& metric, double p, const std::vector<double>& radii,
                                  const LadderOptions& options) {
  require_p(p);
  return ladder_estimate(MassKind::PIsoAlt, p, metric, radii, options, [&](double r) {
    return p_iso_mass_alt_quotient(volume_from_deficit(metric, r, options.quadrature),
                                   capacity_at(metric, r, p, options.quadrature), p);
  });
}

MassEstimate hawking_mass_limit(const RadialMetric& metric, const std::vector<double>& radii,
                                const LadderOptions& options) {
  return ladder_estimate(MassKind::HawkingLimit, 0.0, metric, radii, options,
                         [&](double r) { return geometry::hawking_mass(metric, r); });
}

ChartMetric::ChartMetric(ChartFunction sample, std::string description)
    : sample_(std::move(sample)), description_(std::move(description)) {}

ChartMetric ChartMetric::flat() {
  return ChartMetric(
      [](const Eigen::Vector3d&) {
        return ChartSample{Eigen::Matrix3d::Identity(), {Eigen::Matrix3d::Zero(), Eigen::Matrix3d::Zero(),
                                                         Eigen::Matrix3d::Zero()}};
      },
      "flat");
}

ChartMetric ChartMetric::from_radial(const RadialMetric& metric) {
  ChartMetric chart(
      [metric](const Eigen::Vector3d& x) {
        const double r = x.norm();
        const Eigen::Vector3d n = x / r;
        const geometry::Jet phi = metric.lapse(r);
        const geometry::Jet rho = metric.areal(r);
        const double q = rho.value / r;
        const double a = q * q;
        const double da = 2.0 * q * (rho.d1 * r - rho.value) / (r * r);
        const double b = phi.value * phi.value - a;
        const double db = 2.0 * phi.value * phi.d1 - da;
        const Eigen::Matrix3d nn = n * n.transpose();
        ChartSample s;
        s.g = a * Eigen::Matrix3d::Identity() + b * nn;
        for (int k = 0; k < 3; ++k) {
          // d_k n_i = (delta_ik - n_i n_k) / r
          const Eigen::Vector3d dn = (Eigen::Vector3d::Unit(k) - n * n[k]) / r;
          s.dg[static_cast<std::size_t>(k)] = da * n[k] * Eigen::Matrix3d::Identity() + db * n[k] * nn +
                                              b * (dn * n.transpose() + n * dn.transpose());
        }
        return s;
      },
      "radial(" + metric.description() + ")");
  chart.r_min = metric.r_min();
  return chart;
}

ChartMetric ChartMetric::conformal(std::function<double(const Eigen::Vector3d&)> u,
                                   std::function<Eigen::Vector3d(const Eigen::Vector3d&)> grad_u,
                                   std::string description) {
  return ChartMetric(
      [u = std::move(u), grad_u = std::move(grad_u)](const Eigen::Vector3d& x) {
        const double v = u(x);
        const Eigen::Vector3d du = grad_u(x);
        ChartSample s;
        s.g = std::pow(v, 4) * Eigen::Matrix3d::Identity();
        for (int k = 0; k < 3; ++k) {
          s.dg[static_cast<std::size_t>(k)] = 4.0 * v * v * v * du[k] * Eigen::Matrix3d::Identity();
        }
        return s;
      },
      std::move(description));
}

namespace {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  for (double z : boost::math::legendre_p_zeros<double>(n)) {
    const double dp = boost::math::legendre_p_prime<double>(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes.push_back(z);
    rule.weights.push_back(w);
    if (z != 0.0) {
      rule.nodes.push_back(-z);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

double flux_at_order(const ChartMetric& chart, double r, int polar, int azimuthal) {
  const GaussRule rule = gauss_legendre(polar);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double c = rule.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    double ring = 0.0;
    for (int j = 0; j < azimuthal; ++j) {
      const double ph = 2.0 * pi * (j + 0.5) / azimuthal;
      const Eigen::Vector3d n(s * std::cos(ph), s * std::sin(ph), c);
      const ChartSample g = chart(r * n);
      const Eigen::Matrix3d gi = g.g.inverse();
      // V_k = g^{ij} (d_i g_jk - d_k g_ij)
      Eigen::Vector3d V = Eigen::Vector3d::Zero();
      for (int k = 0; k < 3; ++k) {
        double v = 0.0;
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            v += gi(a, b) * (g.dg[static_cast<std::size_t>(a)](b, k) - g.dg[static_cast<std::size_t>(k)](a, b));
          }
        }
        V[k] = v;
      }
      // nu^k dsigma_g = sqrt(det g) g^{kl} n_l dsigma_delta
      ring += std::sqrt(g.g.determinant()) * V.dot(gi * n);
    }
    sum += rule.weights[i] * ring * (2.0 * pi / azimuthal);
  }
  return sum * r * r / (16.0 * pi);
}

}  // namespace

FluxResult adm_flux(const ChartMetric& chart, double r, const FluxOptions& options) {
  if (!(r > chart.r_min) || !std::isfinite(r)) throw DomainError("adm_flux: radius outside the chart");
  if (options.polar < 2 || options.azimuthal < 4) throw DomainError("adm_flux: quadrature order too low");
  int polar = options.polar, azimuthal = options.azimuthal;
  double previous = flux_at_order(chart, r, polar, azimuthal);
  for (int d = 0; d < options.max_doublings; ++d) {
    polar *= 2;
    azimuthal *= 2;
    const double current = flux_at_order(chart, r, polar, azimuthal);
    const double disagreement = std::abs(current - previous);
    if (disagreement <= options.tolerance * std::max(1.0, std::abs(current))) {
      return {current, polar, azimuthal, disagreement};
    }
    previous = current;
  }
  throw ConvergenceError("adm_flux: sphere quadrature did not settle after " + std::to_string(options.max_doublings) +
                             " order doublings at r = " + format_double(r),
                         previous, std::numeric_limits<double>::infinity());
}

MassEstimate adm_mass_limit(const ChartMetric& chart, const std::vector<double>& radii, const FluxOptions& options,
                            int order) {
  if (radii.empty()) throw DomainError("ADM ladder is empty");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw DomainError("ADM ladder must be strictly increasing");
  }
  MassEstimate est;
  est.kind = MassKind::Adm;
  const auto values =
      parallel_map<double>(radii.size(), [&](std::size_t i) { return adm_flux(chart, radii[i], options).value; });
  for (std::size_t i = 0; i < radii.size(); ++i) est.samples.push_back({radii[i], values[i]});
  if (est.samples.size() >= 4) est.extrapolation = numerics::extrapolate_limit(est.samples, order);
  return est;
}

std::string to_json(const MassEstimate& e, int indent) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(e.kind);
  if (e.kind == MassKind::PIso || e.kind == MassKind::PIsoAlt) j["p"] = e.p;
  j["label"] = e.label;
  auto& samples = j["samples"] = nlohmann::ordered_json::array();
  for (const auto& s : e.samples) samples.push_back({{"scale", s.scale}, {"value", s.value}});
  if (e.extrapolation) {
    const auto& x = *e.extrapolation;
    j["extrapolation"] = {{"model", x.order == 1 ? "v_inf + c1/scale" : "v_inf + c1/scale + c2/scale^2"},
                          {"limit", x.limit},
                          {"coefficients", x.coefficients},
                          {"residual", x.residual},
                          {"monotone_tail", x.monotone_tail}};
  } else {
    j["extrapolation"] = nullptr;
  }
  j["assumptions"] = {{"scalar_nonnegative", e.assumptions.scalar_nonnegative},
                      {"min_scalar", e.assumptions.min_scalar},
                      {"boundary_minimal", e.assumptions.boundary_minimal}};
  return j.dump(indent);
}

void write_ladder_csv(const MassEstimate& e, std::ostream& out) {
  out << "scale,value\n";
  for (const auto& s : e.samples) out << format_double(s.scale) << ',' << format_double(s.value) << '\n';
}

}  // namespace afmass::masses
