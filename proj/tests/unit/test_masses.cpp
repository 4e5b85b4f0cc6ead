#include <cmath>
#include <numbers>
#include <sstream>

#include "afmass/capacity.hpp"
#include "afmass/error.hpp"
#include "afmass/masses.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace afmass;
using namespace afmass::geometry;
using namespace afmass::masses;
using std::numbers::pi;

namespace {

RadialMetric u_family() { return RadialMetric::conformal(RadialExpression::parse("1 + 0.5/sqrt(r^2+1)")); }

// Schwarzschild in the chart r = s^2.
RadialMetric squared_schwarzschild(double m) {
  const auto base = RadialMetric::schwarzschild(m);
  return RadialMetric::warped(
      [base](double s) {
        const Jet f = base.lapse(s * s);
        return Jet{2.0 * s * f.value, 2.0 * f.value + 4.0 * s * s * f.d1, 0.0};
      },
      [base](double s) {
        const Jet f = base.areal(s * s);
        return Jet{f.value, 2.0 * s * f.d1, 2.0 * f.d1 + 4.0 * s * s * f.d2};
      },
      std::sqrt(m / 2.0), "schwarzschild(r = s^2)");
}

ChartMetric off_center(double m, const Eigen::Vector3d& c) {
  ChartMetric chart = ChartMetric::conformal(
      [m, c](const Eigen::Vector3d& x) { return 1.0 + m / (2.0 * (x - c).norm()); },
      [m, c](const Eigen::Vector3d& x) {
        const Eigen::Vector3d d = x - c;
        return Eigen::Vector3d(-m / 2.0 * d / std::pow(d.norm(), 3));
      },
      "off-center");
  chart.r_min = c.norm() + m;
  return chart;
}

}  // namespace

TEST_CASE("quotient formulas") {
  // Euclidean ball: every quotient vanishes.
  for (double R : {0.5, 3.0}) {
    const double V = 4.0 * pi / 3.0 * R * R * R, A = 4.0 * pi * R * R;
    CHECK(std::abs(iso_mass_quotient(V, A)) < 1e-13 * R);
    for (double p : {1.5, 2.0, 2.5}) {
      const double cap = std::pow(R, 3.0 - p);
      CHECK(std::abs(p_iso_mass_quotient(V, cap, p)) < 1e-13 * R);
      CHECK(std::abs(p_iso_mass_alt_quotient(V, cap, p)) < 1e-13 * R);
    }
  }
  CHECK(iso_mass_quotient(10.0, 4.0 * pi) == doctest::Approx(2.0 / (4.0 * pi) * (10.0 - 4.0 * pi / 3.0)));
  CHECK_THROWS_AS(iso_mass_quotient(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(p_iso_mass_quotient(1.0, 1.0, 3.0), DomainError);
  CHECK_THROWS_AS(p_iso_mass_alt_quotient(1.0, -1.0, 2.0), DomainError);
}

TEST_CASE("deficit pipeline agrees with the public quotient") {
  const auto s = RadialMetric::schwarzschild(1.0);
  const auto d = sphere_data(s, 10.0);
  const double direct = iso_mass_quotient(d.volume, d.area);
  const auto est = iso_mass_limit(s, {10.0, 20.0, 100.0, 1000.0});
  CHECK(std::abs(est.samples[0].value - direct) < 1e-9);
}

TEST_CASE("Euclidean masses vanish") {
  const auto e = RadialMetric::euclidean();
  CHECK(std::abs(iso_mass_limit(e).limit()) < 1e-9);
  CHECK(std::abs(p_iso_mass_limit(e, 2.0).limit()) < 1e-6);
  CHECK(std::abs(hawking_mass_limit(e).limit()) < 1e-12);
}

TEST_CASE("Schwarzschild masses") {
  const auto s = RadialMetric::schwarzschild(1.0);
  const auto iso = iso_mass_limit(s);
  REQUIRE(iso.extrapolation);
  CHECK(std::abs(iso.limit() - 1.0) < 1e-4);
  CHECK(iso.assumptions.scalar_nonnegative);
  CHECK(iso.assumptions.boundary_minimal);
  CHECK(iso.label == "radial-exhaustion estimate");

  const auto p2 = p_iso_mass_limit(s, 2.0);
  CHECK(std::abs(p2.limit() - 1.0) < 2e-3);
  const auto p15 = p_iso_mass_limit(s, 1.5);
  CHECK(std::abs(p15.limit() - 1.0) < 5e-3);
  const auto alt = p_iso_mass_alt_limit(s, 1.5);
  CHECK(std::abs(alt.limit() - p15.limit()) < 1e-3);

  const auto h = hawking_mass_limit(s);
  CHECK(std::abs(h.limit() - 1.0) < 1e-9);
  CHECK(h.limit() <= iso.limit() + 1e-3);
  CHECK(p2.limit() <= iso.limit() + 1e-3);

  // At finite scale the two p-isocapacitary quotients differ.
  const auto a10 = p_iso_mass_limit(s, 2.0, {10.0}).samples[0].value;
  const auto b10 = p_iso_mass_alt_limit(s, 2.0, {10.0}).samples[0].value;
  CHECK(a10 != b10);
  CHECK(std::abs(a10 - b10) < 0.5);
}

TEST_CASE("superharmonic family masses") {
  const auto m = u_family();
  CHECK(std::abs(iso_mass_limit(m).limit() - 1.0) < 1e-3);
  CHECK(std::abs(p_iso_mass_limit(m, 2.0).limit() - 1.0) < 2e-3);
  CHECK(iso_mass_limit(m).assumptions.scalar_nonnegative);
}

TEST_CASE("masses do not depend on the radial coordinate") {
  const auto s = RadialMetric::schwarzschild(1.0);
  const auto t = squared_schwarzschild(1.0);
  for (double r : {4.0, 25.0, 400.0}) {
    const double a = iso_mass_limit(s, {r}).samples[0].value;
    const double b = iso_mass_limit(t, {std::sqrt(r)}).samples[0].value;
    CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(a)));
    const double ca = p_iso_mass_limit(s, 1.8, {r}).samples[0].value;
    const double cb = p_iso_mass_limit(t, 1.8, {std::sqrt(r)}).samples[0].value;
    CHECK(std::abs(ca - cb) < 1e-7 * std::max(1.0, std::abs(ca)));
  }
}

TEST_CASE("negative scalar curvature is reported") {
  const auto m = RadialMetric::conformal(RadialExpression::parse("1 - 0.1*exp(-r^2)"));
  const auto est = iso_mass_limit(m);
  CHECK_FALSE(est.assumptions.scalar_nonnegative);
  CHECK(est.assumptions.min_scalar < 0.0);
}

TEST_CASE("ladder validation") {
  const auto s = RadialMetric::schwarzschild(1.0);
  CHECK_THROWS_AS(iso_mass_limit(s, {}), DomainError);
  CHECK_THROWS_AS(iso_mass_limit(s, {10.0, 5.0}), DomainError);
  CHECK_THROWS_AS(iso_mass_limit(s, {0.2, 10.0}), DomainError);
  CHECK_FALSE(iso_mass_limit(s, {10.0, 100.0}).extrapolation);
  CHECK_THROWS_AS(p_iso_mass_limit(s, 3.5), DomainError);
}

TEST_CASE("ADM flux of the flat chart vanishes") {
  const auto f = adm_flux(ChartMetric::flat(), 3.0);
  CHECK(f.value == 0.0);
}

TEST_CASE("ADM flux of conformal charts") {
  const double m = 1.0;
  const auto chart = ChartMetric::from_radial(RadialMetric::schwarzschild(m));
  for (double r : {1.0, 10.0, 1e3}) {
    // -2 r^2 u u' for u = 1 + m/2r
    const double exact = m * (1.0 + m / (2.0 * r));
    CHECK(std::abs(adm_flux(chart, r).value - exact) < 1e-6);
  }
  const auto est = adm_mass_limit(chart);
  CHECK(std::abs(est.limit() - m) < 1e-3);

  const auto ufam = ChartMetric::from_radial(u_family());
  CHECK(std::abs(adm_mass_limit(ufam).limit() - 1.0) < 1e-3);
}

TEST_CASE("radial and conformal charts give the same flux") {
  const double m = 2.0;
  const auto radial = ChartMetric::from_radial(RadialMetric::schwarzschild(m));
  const auto conformal = off_center(m, Eigen::Vector3d::Zero());
  for (double r : {3.0, 50.0}) {
    CHECK(std::abs(adm_flux(radial, r).value - adm_flux(conformal, r).value) < 1e-8);
  }
}

TEST_CASE("off-center Schwarzschild chart") {
  const auto chart = off_center(1.0, Eigen::Vector3d(0.3, -0.2, 0.5));
  const auto est = adm_mass_limit(chart);
  CHECK(std::abs(est.limit() - 1.0) < 1e-3);
  CHECK_THROWS_AS(adm_flux(chart, 0.5), DomainError);
}

TEST_CASE("mass serialization") {
  const auto est = iso_mass_limit(RadialMetric::schwarzschild(1.0));
  const auto j = nlohmann::json::parse(to_json(est));
  CHECK(j["kind"] == "iso");
  CHECK(j["samples"].size() == 4);
  CHECK(j["extrapolation"]["limit"].get<double>() == est.limit());
  std::ostringstream csv;
  write_ladder_csv(est, csv);
  CHECK(csv.str().rfind("scale,value\n100,", 0) == 0);
}
