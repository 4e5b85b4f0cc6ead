#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "afmass/error.hpp"
#include "afmass/imcf.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace afmass;
using namespace afmass::geometry;
using namespace afmass::imcf;
using std::numbers::pi;

namespace {

RadialMetric u_family() { return RadialMetric::conformal(RadialExpression::parse("1 + 0.5/sqrt(r^2+1)")); }

// Areal radius with a bump at r = 3: local maximum near 3.35 followed by a dip.
const char* kNeckAreal = "r + 1.5*(exp(-((r-3)/0.5)^2) - exp(-36))";

RadialMetric neck() { return RadialMetric::warped(RadialExpression::parse("1"), RadialExpression::parse(kNeckAreal)); }

RadialMetric tabulated_neck() {
  const auto rho = RadialExpression::parse(kNeckAreal);
  std::vector<double> r, phi, areal;
  for (int i = 0; i <= 6000; ++i) {
    const double x = 0.005 * i;
    r.push_back(x);
    phi.push_back(1.0);
    areal.push_back(rho.value(x));
  }
  return RadialMetric::from_table(r, phi, areal, "tabulated neck");
}

struct BruteJump {
  double r_a, r_b, area;
};

// Dense uniform grid with a suffix minimum; independent of the hull sweep.
std::vector<BruteJump> brute_force_jumps(const RadialMetric& m, double lo, double hi, double step) {
  std::vector<double> r, a;
  for (double x = lo; x <= hi; x += step) {
    r.push_back(x);
    a.push_back(sphere_area(m, x));
  }
  std::vector<double> tail(a.size());
  tail.back() = a.back();
  for (std::size_t i = a.size() - 1; i-- > 0;) tail[i] = std::min(a[i], tail[i + 1]);
  std::vector<BruteJump> out;
  for (std::size_t i = 0; i + 1 < a.size();) {
    if (tail[i] < a[i]) {
      const std::size_t i0 = i;
      while (i + 1 < a.size() && tail[i] < a[i]) ++i;
      out.push_back({r[i0], r[i], a[i]});
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("tail minimum of monotone areas") {
  const auto e = tail_min_area(RadialMetric::euclidean(), 2.0);
  CHECK(std::abs(e.area - 16.0 * pi) < 1e-12);
  CHECK(e.radius == 2.0);
  const auto s = RadialMetric::schwarzschild(1.0);
  double prev = 0.0;
  for (double r = 0.5; r < 100.0; r += 0.01) {
    const double a = sphere_area(s, r);
    CHECK(a > prev);
    prev = a;
  }
  const auto t = tail_min_area(s, 0.6);
  CHECK(t.area == sphere_area(s, 0.6));
  CHECK(t.radius == 0.6);
}

TEST_CASE("tail minimum left of a neck is the dip") {
  for (const auto& m : {neck(), tabulated_neck()}) {
    const auto brute = brute_force_jumps(m, 1.0, 29.0, 1e-4);
    REQUIRE(brute.size() == 1);
    const auto t = tail_min_area(m, 3.2, {.r_far = 29.0});
    CHECK(std::abs(t.radius - brute[0].r_b) < 2e-4);
    CHECK(std::abs(t.area - brute[0].area) < 1e-7 * brute[0].area);
    CHECK(t.area < sphere_area(m, 3.2));
  }
}

TEST_CASE("hull sweep rejects tails that are not bounded below") {
  const auto shrinking = RadialMetric::warped(RadialExpression::parse("1"), RadialExpression::parse("1/(1+r)"), 0.0);
  CHECK_THROWS_AS(Hull::compute(shrinking, 0.0), PreconditionError);
}

TEST_CASE("Euclidean flow from the unit sphere") {
  const auto flow = weak_imcf(RadialMetric::euclidean(), 1.0);
  CHECK(flow.jumps.empty());
  CHECK(flow.normalization == doctest::Approx(4.0 * pi));
  for (double r : {1.0, 2.0, 13.0}) CHECK(std::abs(flow.w(r) - 2.0 * std::log(r)) < 1e-13);
  for (const auto& s : flow.samples) {
    CHECK(std::abs(s.area / (flow.normalization * std::exp(s.t)) - 1.0) < 1e-10);
    CHECK(std::abs(s.r - std::exp(0.5 * s.t)) < 1e-12 * s.r);
    CHECK(std::abs(s.hawking) < 1e-12 * s.r);
  }
  CHECK(flow.samples.front().t == 0.0);
  CHECK(flow.samples.size() > 1000);
}

TEST_CASE("Schwarzschild flow keeps the Hawking mass") {
  const auto flow = weak_imcf(RadialMetric::schwarzschild(1.0), 0.5);
  CHECK(flow.jumps.empty());
  for (std::size_t i = 0; i < flow.samples.size(); ++i) {
    const auto& s = flow.samples[i];
    CHECK(std::abs(s.hawking - 1.0) < 1e-9);
    CHECK(std::abs(s.area / (flow.normalization * std::exp(s.t)) - 1.0) < 1e-10);
    if (i > 0) {
      CHECK(s.t > flow.samples[i - 1].t);
      CHECK(s.r >= flow.samples[i - 1].r);
    }
  }
}

TEST_CASE("neck flow has exactly one jump matching the brute-force hull") {
  for (const auto& m : {neck(), tabulated_neck()}) {
    FlowOptions opt;
    opt.hull.r_far = 29.0;
    opt.t_max = 2.0 * std::log(25.0);
    const auto flow = weak_imcf(m, 1.0, opt);
    REQUIRE(flow.jumps.size() == 1);
    const auto brute = brute_force_jumps(m, 1.0, 29.0, 1e-4);
    REQUIRE(brute.size() == 1);
    const auto& j = flow.jumps.front();
    CHECK(std::abs(j.r_before - brute[0].r_a) < 2e-4);
    CHECK(std::abs(j.r_after - brute[0].r_b) < 2e-4);
    CHECK(std::abs(sphere_area(m, j.r_before) / sphere_area(m, j.r_after) - 1.0) < 1e-8);
    CHECK(j.volume_after > j.volume_before);
    CHECK(std::abs(j.t - std::log(j.area / flow.normalization)) < 1e-15);

    // w nondecreasing, constant on the jump interval, Â < A strictly inside it.
    double prev = -1e300;
    for (double r = 1.0; r < 28.0; r += 0.003) {
      const double w = flow.w(r);
      CHECK(w >= prev);
      prev = w;
      if (r > j.r_before && r < j.r_after) {
        CHECK(w == doctest::Approx(j.t).epsilon(1e-14));
        CHECK(flow.hull->area(r) < sphere_area(m, r));
      } else {
        CHECK(flow.hull->area(r) == sphere_area(m, r));
      }
    }
    // Merged rows carry the jump twice.
    int jump_rows = 0;
    for (const auto& row : flow.merged()) jump_rows += row.is_jump ? 1 : 0;
    CHECK(jump_rows == 2);
    // Right-continuity of r(t).
    CHECK(flow.radius_at(j.t) == j.r_after);
    CHECK(flow.radius_at(j.t - 1e-9) < j.r_before + 1e-6);
  }
}

TEST_CASE("flow from inside a fattened region is rejected") {
  CHECK_THROWS_AS(weak_imcf(neck(), 3.2), PreconditionError);
  CHECK_THROWS_AS(imcf_from_pole(RadialMetric::schwarzschild(1.0)), PreconditionError);
  CHECK_THROWS_AS(weak_imcf(RadialMetric::euclidean(), 0.0), PreconditionError);
}

TEST_CASE("Euclidean pole flow and t(v)") {
  const auto flow = imcf_from_pole(RadialMetric::euclidean());
  CHECK(flow.normalization == doctest::Approx(4.0 * pi).epsilon(1e-15));
  for (double t : {-3.0, 0.0, 1.7}) CHECK(std::abs(flow.radius_at(t) - std::exp(0.5 * t)) < 1e-12 * std::exp(0.5 * t));
  CHECK(std::abs(t_of_v(flow, 4.0 * pi / 3.0)) < 1e-12);
  CHECK(std::abs(t_of_v(flow, 32.0 * pi / 3.0) - 2.0 * std::log(2.0)) < 1e-12);
  CHECK_THROWS_AS(t_of_v(flow, 1e30), DomainError);
  CHECK_THROWS_AS(t_of_v(flow, 0.0), DomainError);
}

TEST_CASE("pole flow on the superharmonic family") {
  const auto m = u_family();
  const auto flow = imcf_from_pole(m);
  for (std::size_t i = 0; i < flow.samples.size(); ++i) {
    const auto& s = flow.samples[i];
    CHECK(std::abs(s.area / (4.0 * pi * std::exp(s.t)) - 1.0) < 1e-10);
    if (i % 100 == 0) CHECK(std::abs(s.volume / enclosed_volume(m, 0.0, s.r) - 1.0) < 1e-9);
    if (i > 0) CHECK(s.hawking >= flow.samples[i - 1].hawking - 1e-9);
    // Reverse Willmore.
    const double H = mean_curvature(m, s.r);
    CHECK(s.area * H * H <= 16.0 * pi + 1e-9);
  }
  // Shi's inequality on a volume ladder.
  for (int k = 0; k < 30; ++k) {
    const double v = 1e-3 * std::pow(10.0, 0.3 * k);
    const double t = t_of_v(flow, v);
    const double area = 4.0 * pi * std::exp(t);
    CHECK(area <= std::cbrt(36.0 * pi) * std::pow(v, 2.0 / 3.0) + 1e-9);
  }
}

TEST_CASE("t(v) inside the neck's volume gap is the jump time") {
  const auto m = RadialMetric::warped(RadialExpression::parse("1"), RadialExpression::parse(kNeckAreal));
  REQUIRE(m.complete());
  FlowOptions opt;
  opt.hull.r_far = 29.0;
  opt.t_max = 2.0 * std::log(25.0);
  const auto flow = imcf_from_pole(m, opt);
  REQUIRE(flow.jumps.size() == 1);
  const auto& j = flow.jumps.front();
  for (double f : {0.01, 0.3, 0.7, 1.0}) {
    const double v = j.volume_before + f * (j.volume_after - j.volume_before);
    const double t = t_of_v(flow, v);
    CHECK(t == j.t);
    const double area = sphere_area(m, flow.radius_at(t));
    CHECK(std::abs(area / j.area - 1.0) < 1e-8);
  }
  // Just below the gap the time is still below the jump.
  CHECK(t_of_v(flow, j.volume_before * (1.0 - 1e-6)) < j.t);
}

TEST_CASE("Geroch derivative") {
  CHECK(geroch_derivative(RadialMetric::euclidean(), 2.0) == 0.0);
  const auto s = RadialMetric::schwarzschild(1.0);
  for (double r : {0.6, 2.0, 30.0}) CHECK(std::abs(geroch_derivative(s, r)) < 1e-12);

  const auto m = u_family();
  const auto flow = imcf_from_pole(m);
  const double h = 1e-3;
  for (int k = 0; k < 20; ++k) {
    const double t = -4.0 + 0.4 * k;
    const double slope =
        (hawking_mass(m, flow.radius_at(t + h)) - hawking_mass(m, flow.radius_at(t - h))) / (2.0 * h);
    const double analytic = geroch_derivative(m, flow.radius_at(t));
    CHECK(analytic > 0.0);
    CHECK(std::abs(analytic - slope) < 1e-4 * std::abs(slope));
  }
}

TEST_CASE("flow serialization") {
  FlowOptions opt;
  opt.hull.r_far = 29.0;
  opt.t_max = 5.0;
  opt.dt = 0.5;
  const auto flow = weak_imcf(neck(), 1.0, opt);
  std::ostringstream csv;
  write_csv(flow, csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,r,area,volume,hawking,is_jump");
  int rows = 0, jumps = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.back() == '1') ++jumps;
  }
  CHECK(rows == static_cast<int>(flow.samples.size() + flow.jumps.size()));
  CHECK(jumps == 2);

  const auto j = nlohmann::json::parse(to_json(flow));
  CHECK(j["origin"] == "boundary");
  CHECK(j["samples"].size() == flow.samples.size());
  CHECK(j["jumps"].size() == 1);
  CHECK(j["samples"][3]["t"].get<double>() == flow.samples[3].t);
}
