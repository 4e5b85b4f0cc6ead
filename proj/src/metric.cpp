#include "afmass/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "afmass/error.hpp"
#include "afmass/roots.hpp"
#include "afmass/spline.hpp"

namespace afmass::geometry {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::Schwarzschild: return "schwarzschild";
    case MetricKind::Conformal: return "conformal";
    case MetricKind::Warped: return "warped";
  }
  return "unknown";
}

struct RadialMetric::Model {
  MetricKind kind = MetricKind::Warped;
  std::string description;
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
  std::optional<double> mass;
  JetFunction lapse;
  JetFunction areal;
  JetFunction conformal;  // empty unless built from u
  bool boundary_minimal = false;
  bool non_outward_region = false;
  bool complete = false;
};

namespace {

// Offsets from r_min, geometric from 1e-6 to the scan horizon.
std::vector<double> scan_grid(double r_min, double r_max, int points) {
  const double horizon = std::isfinite(r_max) ? r_max : r_min + 1e6 * std::max(1.0, r_min);
  const double span = horizon - r_min;
  const double first = std::min(1e-6 * std::max(1.0, r_min), 1e-3 * span);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points) + 1);
  grid.push_back(r_min);
  const double ratio = std::pow(span / first, 1.0 / (points - 1));
  double offset = first;
  for (int i = 0; i < points; ++i) {
    grid.push_back(i == points - 1 ? horizon : r_min + offset);
    offset *= ratio;
  }
  return grid;
}

Jet conformal_lapse(const Jet& u) {
  return {u.value * u.value, 2.0 * u.value * u.d1, 2.0 * (u.d1 * u.d1 + u.value * u.d2)};
}

Jet conformal_areal(const Jet& u, double r) {
  const double uu = u.value * u.value;
  return {uu * r, uu + 2.0 * u.value * u.d1 * r,
          4.0 * u.value * u.d1 + 2.0 * r * (u.d1 * u.d1 + u.value * u.d2)};
}

}  // namespace

RadialMetric::RadialMetric(std::shared_ptr<const Model> model) : model_(std::move(model)) {}

RadialMetric RadialMetric::finish(std::shared_ptr<Model> m) {
  if (!(m->r_min >= 0.0) || !std::isfinite(m->r_min)) throw DomainError("metric: r_min must be finite and >= 0");
  if (!(m->r_max > m->r_min)) throw DomainError("metric: empty radial domain");
  const Jet rho0 = m->areal(m->r_min);
  m->complete = (m->r_min == 0.0 && rho0.value == 0.0);
  for (double r : scan_grid(m->r_min, m->r_max, 4000)) {
    const Jet phi = m->lapse(r);
    const Jet rho = m->areal(r);
    if (!(phi.value > 0.0)) {
      throw DomainError("metric '" + m->description + "': lapse not positive at r = " + std::to_string(r));
    }
    if (!(rho.value > 0.0) && !(m->complete && r == 0.0)) {
      throw DomainError("metric '" + m->description + "': areal radius not positive at r = " +
                        std::to_string(r));
    }
    if (rho.d1 < -1e-10 * std::max(1.0, std::abs(rho.value))) m->non_outward_region = true;
  }
  m->boundary_minimal = !m->complete && std::abs(rho0.d1) <= 1e-10 * std::max(1.0, std::abs(rho0.value));
  return RadialMetric(std::move(m));
}

RadialMetric RadialMetric::euclidean() {
  auto m = std::make_shared<Model>();
  m->kind = MetricKind::Euclidean;
  m->description = "euclidean";
  m->lapse = [](double) { return Jet{1.0, 0.0, 0.0}; };
  m->areal = [](double r) { return Jet{r, 1.0, 0.0}; };
  m->conformal = [](double) { return Jet{1.0, 0.0, 0.0}; };
  return finish(m);
}

RadialMetric RadialMetric::schwarzschild(double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("schwarzschild: mass must be positive");
  auto m = std::make_shared<Model>();
  m->kind = MetricKind::Schwarzschild;
  std::ostringstream os;
  os.precision(17);
  os << "schwarzschild(m=" << mass << ")";
  m->description = os.str();
  m->mass = mass;
  m->r_min = mass / 2.0;
  auto u = [mass](double r) {
    return Jet{1.0 + mass / (2.0 * r), -mass / (2.0 * r * r), mass / (r * r * r)};
  };
  m->conformal = u;
  m->lapse = [u](double r) { return conformal_lapse(u(r)); };
  m->areal = [u](double r) { return conformal_areal(u(r), r); };
  return finish(m);
}

RadialMetric RadialMetric::conformal(JetFunction u, double r_min, std::string description) {
  auto m = std::make_shared<Model>();
  m->kind = MetricKind::Conformal;
  m->description = std::move(description);
  m->r_min = r_min;
  m->conformal = u;
  m->lapse = [u](double r) { return conformal_lapse(u(r)); };
  m->areal = [u](double r) { return conformal_areal(u(r), r); };
  return finish(m);
}

RadialMetric RadialMetric::conformal(const RadialExpression& u, double r_min) {
  return conformal([u](double r) { return u.jet(r); }, r_min, "conformal(u=" + u.source() + ")");
}

RadialMetric RadialMetric::warped(JetFunction lapse, JetFunction areal, double r_min,
                                  std::string description, double r_max) {
  auto m = std::make_shared<Model>();
  m->kind = MetricKind::Warped;
  m->description = std::move(description);
  m->r_min = r_min;
  m->r_max = r_max;
  m->lapse = std::move(lapse);
  m->areal = std::move(areal);
  return finish(m);
}

RadialMetric RadialMetric::warped(const RadialExpression& lapse, const RadialExpression& areal,
                                  double r_min) {
  return warped([lapse](double r) { return lapse.jet(r); }, [areal](double r) { return areal.jet(r); },
                r_min, "warped(phi=" + lapse.source() + ", rho=" + areal.source() + ")");
}

RadialMetric RadialMetric::from_table(std::span<const double> r, std::span<const double> lapse,
                                      std::span<const double> areal, std::string description) {
  if (r.size() < 16) throw DomainError("table metric: at least 16 rows are required");
  if (lapse.size() != r.size() || areal.size() != r.size()) {
    throw DomainError("table metric: column lengths differ");
  }
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw DomainError("table metric: r must be strictly increasing");
  }
  auto phi = std::make_shared<const CubicSpline>(r, lapse);
  auto rho = std::make_shared<const CubicSpline>(r, areal);
  return warped([phi](double x) { return phi->jet(x); }, [rho](double x) { return rho->jet(x); }, r.front(),
                std::move(description), r.back());
}

RadialMetric RadialMetric::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("table metric: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DomainError("table metric: empty file " + path.string());
  line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\r'; }),
             line.end());
  if (line != "r,phi,rho") throw DomainError("table metric: header must be 'r,phi,rho' in " + path.string());
  std::vector<double> r, phi, rho;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) {
      throw DomainError("table metric: malformed row at " + path.string() + ":" + std::to_string(lineno));
    }
    try {
      r.push_back(std::stod(a));
      phi.push_back(std::stod(b));
      rho.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw DomainError("table metric: non-numeric value at " + path.string() + ":" + std::to_string(lineno));
    }
  }
  return from_table(r, phi, rho, "table(" + path.filename().string() + ")");
}

MetricKind RadialMetric::kind() const noexcept { return model_->kind; }
std::optional<double> RadialMetric::schwarzschild_mass() const noexcept { return model_->mass; }
const std::string& RadialMetric::description() const noexcept { return model_->description; }
double RadialMetric::r_min() const noexcept { return model_->r_min; }
double RadialMetric::r_max() const noexcept { return model_->r_max; }
Jet RadialMetric::lapse(double r) const { return model_->lapse(r); }
Jet RadialMetric::areal(double r) const { return model_->areal(r); }
bool RadialMetric::has_conformal_factor() const noexcept { return static_cast<bool>(model_->conformal); }

Jet RadialMetric::conformal_factor(double r) const {
  if (!model_->conformal) throw DomainError("metric '" + model_->description + "' has no conformal factor");
  return model_->conformal(r);
}

bool RadialMetric::boundary_minimal() const noexcept { return model_->boundary_minimal; }
bool RadialMetric::has_non_outward_minimizing_region() const noexcept { return model_->non_outward_region; }
bool RadialMetric::complete() const noexcept { return model_->complete; }

void RadialMetric::require_in_domain(double r, const char* operation) const {
  if (!(r >= model_->r_min && r <= model_->r_max)) {
    throw DomainError(std::string(operation) + ": r = " + std::to_string(r) + " outside [" +
                      std::to_string(model_->r_min) + ", " + std::to_string(model_->r_max) + "]");
  }
}

namespace {

std::optional<double> outermost_zero(const std::function<double(double)>& drho, double lo, double hi) {
  const int points = 4000;
  const double ratio = std::pow(hi / lo, 1.0 / points);
  double right = hi;
  double f_right = drho(right);
  for (int i = 0; i < points; ++i) {
    const double left = (i == points - 1) ? lo : right / ratio;
    const double f_left = drho(left);
    if (f_left == 0.0) return left;
    if ((f_left < 0.0) != (f_right < 0.0)) return numerics::find_root(drho, left, right);
    right = left;
    f_right = f_left;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> find_outermost_minimal_sphere(const RadialMetric& metric, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("find_outermost_minimal_sphere: need 0 < lo < hi");
  return outermost_zero([&metric](double r) { return metric.areal(r).d1; }, lo, hi);
}

std::optional<double> find_outermost_minimal_sphere(const JetFunction& u, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("find_outermost_minimal_sphere: need 0 < lo < hi");
  return outermost_zero([&u](double r) { return conformal_areal(u(r), r).d1; }, lo, hi);
}

RadialMetric conformal_exterior(const RadialExpression& u, double lo, double hi) {
  const JetFunction f = [u](double r) { return u.jet(r); };
  const auto horizon = find_outermost_minimal_sphere(f, lo, hi);
  if (!horizon) throw PreconditionError("conformal factor " + u.source() + " has no minimal sphere in the search range");
  return RadialMetric::conformal(f, *horizon, "conformal(u=" + u.source() + ", horizon)");
}

Jet finite_difference_jet(const JetFunction& f, double r) {
  const double h1 = std::max(1e-6, 1e-6 * std::abs(r));
  const double h2 = std::max(1e-4, 1e-4 * std::abs(r));
  const double f0 = f(r).value;
  const double d1 = (f(r + h1).value - f(r - h1).value) / (2.0 * h1);
  const double d2 = (f(r + h2).value - 2.0 * f0 + f(r - h2).value) / (h2 * h2);
  return {f0, d1, d2};
}

}  // namespace afmass::geometry
