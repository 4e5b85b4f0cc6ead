// One PASS/FAIL line per acceptance criterion. argv[1] is the afmass executable.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <functional>
#include <limits>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "afmass/capacity.hpp"
#include "afmass/format.hpp"
#include "afmass/hypergeometric.hpp"
#include "afmass/imcf.hpp"
#include "afmass/masses.hpp"
#include "afmass/verify.hpp"

using namespace afmass;
using namespace afmass::geometry;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.ok) ++failures;
  std::cout << (o.ok ? "PASS" : "FAIL") << "  " << id << ". " << title << ":" << o.detail.str() << std::endl;
}

std::string fmt(double v) { return format_double(v); }

RadialMetric u_family() { return RadialMetric::conformal(RadialExpression::parse("1 + 0.5/sqrt(r^2+1)")); }

const std::vector<double> kLadder{1e2, 1e3, 1e4, 1e5};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "afmass";

  criterion(1, "Schwarzschild constancy", [](Outcome& o) {
    const double m = 1.0;
    const auto s = RadialMetric::schwarzschild(m);
    double worst = 0.0;
    for (double areal : {3.0, 10.0, 100.0}) {
      const double r = schwarzschild_coordinate_radius(m, areal);
      // closed-form sphere data: A = 4 pi s^2, H = (2/s) sqrt(1 - 2m/s)
      const double A = 4.0 * pi * areal * areal;
      const double H = 2.0 / areal * std::sqrt(1.0 - 2.0 * m / areal);
      const double oracle = std::sqrt(A / (16.0 * pi)) * (1.0 - A * H * H / (16.0 * pi));
      worst = std::max({worst, std::abs(hawking_mass(s, r) - 1.0), std::abs(oracle - 1.0)});
    }
    o.detail << " max |m_H - 1| = " << fmt(worst);
    o.require(worst < 1e-10, "1e-10");
  });

  criterion(2, "Penrose equality", [](Outcome& o) {
    const auto s = RadialMetric::schwarzschild(1.0);
    const double lhs = std::sqrt(sphere_area(s, s.r_min()) / (16.0 * pi));
    const auto iso = masses::iso_mass_limit(s, kLadder);
    o.detail << " sqrt(A/16pi) = " << fmt(lhs) << ", iso limit = " << fmt(iso.limit());
    o.require(std::abs(lhs - 1.0) < 1e-10, "horizon 1e-10");
    o.require(iso.extrapolation.has_value() && iso.extrapolation->order == 1, "1/R extrapolation");
    o.require(std::abs(iso.limit() - 1.0) < 1e-4, "iso 1e-4");
  });

  criterion(3, "ADM recovery", [](Outcome& o) {
    const double m = 1.0;
    const auto chart = masses::ChartMetric::from_radial(RadialMetric::schwarzschild(m));
    const auto adm = masses::adm_mass_limit(chart, kLadder);
    o.detail << " Schwarzschild flux limit = " << fmt(adm.limit());
    o.require(std::abs(adm.limit() - 1.0) < 1e-3, "limit 1e-3");

    // Conformal-flux oracle on closed-form factors. Per radius, the flux of u^4 delta is
    // -2 r^2 u u'; its limit equals that of -2 r^2 u' = -(1/2pi) oint d_r u.
    struct Factor {
      const char* name;
      std::function<double(double)> u, du;
      RadialMetric metric;
    };
    const std::vector<Factor> factors{
        {"schwarzschild", [m](double r) { return 1.0 + m / (2.0 * r); }, [m](double r) { return -m / (2.0 * r * r); },
         RadialMetric::schwarzschild(m)},
        {"u-family", [](double r) { return 1.0 + 0.5 / std::sqrt(r * r + 1.0); },
         [](double r) { return -0.5 * r / std::pow(r * r + 1.0, 1.5); }, u_family()}};
    double worst_radius = 0.0, worst_limit = 0.0;
    for (const auto& f : factors) {
      const auto c = masses::ChartMetric::from_radial(f.metric);
      std::vector<numerics::ScaleValue> oracle;
      for (double r : kLadder) {
        const double flux = masses::adm_flux(c, r).value;
        worst_radius = std::max(worst_radius, std::abs(flux + 2.0 * r * r * f.u(r) * f.du(r)));
        oracle.push_back({r, -2.0 * r * r * f.du(r)});
      }
      const double lim = masses::adm_mass_limit(c, kLadder).limit();
      worst_limit = std::max(worst_limit, std::abs(lim - numerics::extrapolate_limit(oracle).limit));
    }
    o.detail << ", max per-radius oracle gap = " << fmt(worst_radius) << ", limit gap = " << fmt(worst_limit);
    o.require(worst_radius < 1e-6, "per radius 1e-6");
    o.require(worst_limit < 1e-6, "limit 1e-6");
  });

  criterion(4, "Euclidean zero and capacity normalization", [](Outcome& o) {
    const auto e = RadialMetric::euclidean();
    double worst = 0.0;
    worst = std::max(worst, std::abs(masses::iso_mass_limit(e, kLadder).limit()));
    worst = std::max(worst, std::abs(masses::hawking_mass_limit(e, kLadder).limit()));
    worst = std::max(worst, std::abs(masses::adm_mass_limit(masses::ChartMetric::flat(), kLadder).limit()));
    worst = std::max(worst, std::abs(masses::adm_mass_limit(masses::ChartMetric::from_radial(e), kLadder).limit()));
    for (double p : {1.2, 1.5, 2.0}) {
      worst = std::max(worst, std::abs(masses::p_iso_mass_limit(e, p, kLadder).limit()));
      worst = std::max(worst, std::abs(masses::p_iso_mass_alt_limit(e, p, kLadder).limit()));
    }
    double cap = 0.0;
    for (double p : {1.5, 2.0, 2.5}) {
      for (double R : {0.5, 1.0, 4.0}) {
        cap = std::max(cap, std::abs(capacity::p_capacity_radial(e, R, p).ncap - std::pow(R, 3.0 - p)));
      }
    }
    o.detail << " max |mass| = " << fmt(worst) << ", max |ncap - R^(3-p)| = " << fmt(cap);
    o.require(worst < 1e-6, "masses 1e-6");
    o.require(cap < 1e-9, "ncap 1e-9");
  });

  criterion(5, "Schwarzschild 2-capacity", [](Outcome& o) {
    const double m = 1.0;
    const auto s = RadialMetric::schwarzschild(m);
    const auto sol = capacity::p_capacity_radial(s, s.r_min(), 2.0);
    double pot = 0.0;
    for (const auto& smp : sol.potential) {
      const double oracle = 1.0 - (1.0 - m / (2.0 * smp.r)) / (1.0 + m / (2.0 * smp.r));
      pot = std::max(pot, std::abs(smp.u - oracle));
    }
    const auto d = sphere_data(s, s.r_min());
    const double bound = capacity::bray_miao_bound(d.area, d.willmore, 2.0);
    o.detail << " ncap = " << fmt(sol.ncap) << ", potential gap = " << fmt(pot) << ", bound = " << fmt(bound);
    o.require(std::abs(sol.ncap - m) < 1e-8, "ncap 1e-8");
    o.require(pot < 1e-8, "potential");
    o.require(std::abs(bound - sol.ncap) < 1e-8, "Bray-Miao equality 1e-8");
  });

  criterion(6, "Geroch derivative", [](Outcome& o) {
    const auto m = u_family();
    const auto flow = imcf::imcf_from_pole(m);
    const double h = 1e-3;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double t = -4.0 + 0.4 * k;
      const double fd = (hawking_mass(m, flow.radius_at(t + h)) - hawking_mass(m, flow.radius_at(t - h))) / (2.0 * h);
      const double an = imcf::geroch_derivative(m, flow.radius_at(t));
      worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-300));
    }
    double min_step = std::numeric_limits<double>::infinity();
    const auto rows = flow.merged();
    for (std::size_t i = 1; i < rows.size(); ++i) {
      min_step = std::min(min_step, rows[i].sample.hawking - rows[i - 1].sample.hawking);
    }
    o.detail << " max relative FD gap = " << fmt(worst) << ", smallest m_H step = " << fmt(min_step);
    o.require(worst < 1e-4, "relative 1e-4");
    o.require(min_step >= 0.0, "nondecreasing");
  });

  criterion(7, "Shi's inequality", [](Outcome& o) {
    auto margins = [](const RadialMetric& m) {
      const auto flow = imcf::imcf_from_pole(m);
      std::vector<double> out;
      for (int i = 0; i < 30; ++i) {
        const double v = 1e-2 * std::pow(1e4, i / 29.0);
        const double area = sphere_area(m, flow.radius_at(imcf::t_of_v(flow, v)));
        out.push_back(std::cbrt(36.0 * pi) * std::pow(v, 2.0 / 3.0) - area);
      }
      return out;
    };
    double worst = std::numeric_limits<double>::infinity();
    for (double x : margins(u_family())) worst = std::min(worst, x);
    double euclid = 0.0;
    for (double x : margins(RadialMetric::euclidean())) euclid = std::max(euclid, std::abs(x));
    o.detail << " smallest margin = " << fmt(worst) << ", Euclidean max |gap| = " << fmt(euclid);
    o.require(worst >= -1e-9, "area <= bound + 1e-9");
    o.require(euclid < 1e-10, "Euclidean equality 1e-10");
  });

  criterion(8, "Jump semantics", [](Outcome& o) {
    const auto m = RadialMetric::warped(RadialExpression::parse("1"),
                                        RadialExpression::parse("r + 1.5*(exp(-((r-3)/0.5)^2) - exp(-36))"));
    imcf::FlowOptions opt;
    opt.hull.r_far = 29.0;
    opt.t_max = 2.0 * std::log(25.0);
    const auto flow = imcf::weak_imcf(m, 1.0, opt);
    // dense uniform grid with a suffix minimum
    const double step = 1e-4;
    std::vector<double> r, a;
    for (double x = 1.0; x <= 29.0; x += step) {
      r.push_back(x);
      a.push_back(sphere_area(m, x));
    }
    std::vector<double> tail(a.size());
    tail.back() = a.back();
    for (std::size_t i = a.size() - 1; i-- > 0;) tail[i] = std::min(a[i], tail[i + 1]);
    double ra = -1.0, rb = -1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (tail[i] < a[i]) {
        if (ra < 0.0) ra = r[i];
        rb = r[i];
      }
    }
    o.require(flow.jumps.size() == 1, "one jump");
    if (flow.jumps.size() != 1) return;
    const auto& j = flow.jumps.front();
    const double gap = std::max(std::abs(j.r_before - ra), std::abs(j.r_after - (rb + step)));
    const double cont = std::abs(sphere_area(m, j.r_before) / sphere_area(m, j.r_after) - 1.0);
    double prev = -1e300;
    bool monotone = true;
    for (double x = 1.0; x < 28.0; x += 1e-3) {
      monotone = monotone && flow.w(x) >= prev;
      prev = flow.w(x);
    }
    o.detail << " jump (" << fmt(j.r_before) << ", " << fmt(j.r_after) << ") vs grid (" << fmt(ra) << ", "
             << fmt(rb + step) << "), area continuity " << fmt(cont);
    o.require(gap < 2.0 * step, "grid resolution");
    o.require(cont < 1e-8, "area continuity 1e-8");
    o.require(monotone, "w nondecreasing");
  });

  criterion(9, "Hypergeometric kernel", [](Outcome& o) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double z = i / 100.0;
      const double exact = z == 0.0 ? 1.0 : 2.0 * (1.0 - std::sqrt(1.0 - z)) / z;
      worst = std::max(worst, std::abs(numerics::hyp2f1(0.5, 1.0, 2.0, z) - exact));
    }
    const double one = numerics::hyp2f1(0.5, 1.0, 2.0, 1.0);
    o.detail << " max gap = " << fmt(worst) << ", value at 1 = " << fmt(one);
    o.require(worst < 1e-12, "1e-12");
    o.require(std::abs(one - 2.0) < 1e-12, "Gamma ratio");
  });

  criterion(10, "Mass equivalence", [](Outcome& o) {
    const std::vector<std::pair<const char*, RadialMetric>> equal{{"schwarzschild", RadialMetric::schwarzschild(1.0)},
                                                                  {"u-family", u_family()}};
    double spread = 0.0;
    for (const auto& [name, m] : equal) {
      std::vector<double> v{masses::iso_mass_limit(m, kLadder).limit(),
                            masses::adm_mass_limit(masses::ChartMetric::from_radial(m), kLadder).limit()};
      for (double p : {1.2, 1.5, 2.0}) {
        v.push_back(masses::p_iso_mass_limit(m, p, kLadder).limit());
        v.push_back(masses::p_iso_mass_alt_limit(m, p, kLadder).limit());
      }
      spread = std::max(spread, *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()));
    }
    const std::vector<RadialMetric> all{RadialMetric::schwarzschild(1.0), u_family(), RadialMetric::euclidean(),
                                        conformal_exterior(RadialExpression::parse("1 + 0.5/r + 0.25/sqrt(r^2+1)")),
                                        RadialMetric::conformal(RadialExpression::parse("1 - 0.1*exp(-r^2)"))};
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& m : all) {
      const double iso = masses::iso_mass_limit(m, kLadder).limit();
      for (double p : {1.2, 1.5, 2.0}) {
        slack = std::min(slack, iso - masses::p_iso_mass_limit(m, p, kLadder).limit());
        slack = std::min(slack, iso - masses::p_iso_mass_alt_limit(m, p, kLadder).limit());
      }
    }
    o.detail << " largest pairwise gap = " << fmt(spread) << ", smallest iso - p_iso = " << fmt(slack);
    o.require(spread < 2e-3, "gaps 2e-3");
    o.require(slack >= -1e-3, "p_iso <= iso + 1e-3");
  });

  criterion(11, "Profile identities", [](Outcome& o) {
    double fd_gap = 0.0;
    bool increasing = true;
    for (const auto& m : {RadialMetric::schwarzschild(1.0), RadialMetric::euclidean(), u_family()}) {
      for (const auto& e : verify::check_profile_monotonicity(m)) {
        if (e.name == "profile_monotonicity.derivative") fd_gap = std::max(fd_gap, e.lhs);
        if (e.name == "profile_monotonicity.increasing") increasing = increasing && e.status == verify::Status::Pass;
      }
    }
    double energy = std::numeric_limits<double>::quiet_NaN();
    for (const auto& e : verify::check_profile_chain(RadialMetric::schwarzschild(1.0))) {
      if (e.name == "profile_chain.i_prime_squared_i") energy = e.lhs;
    }
    o.detail << " max relative |I' - FD| = " << fmt(fd_gap) << ", |lim I'^2 I - 16pi| = " << fmt(energy);
    o.require(fd_gap < 1e-5, "I' = H 1e-5");
    o.require(energy < 1e-3, "16 pi 1e-3");
    o.require(increasing, "strictly increasing");
  });

  criterion(12, "Determinism", [&cli](Outcome& o) {
    const fs::path dir = fs::temp_directory_path() / "afmass_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "config.json") << R"({"command": "verify", "metric": {"type": "schwarzschild", "mass": 1.0}})";
    int status[2];
    for (int i = 0; i < 2; ++i) {
      const std::string cmd = "\"" + cli + "\" --config \"" + (dir / "config.json").string() + "\" --out \"" +
                              (dir / ("run" + std::to_string(i))).string() + "\" --stable-output > /dev/null";
      status[i] = std::system(cmd.c_str());
    }
    const std::string a = slurp(dir / "run0" / "verify.json"), b = slurp(dir / "run1" / "verify.json");
    const std::string ta = slurp(dir / "run0" / "verify.txt"), tb = slurp(dir / "run1" / "verify.txt");
    o.detail << " exit statuses " << status[0] << ", " << status[1] << "; " << a.size() << " bytes";
    o.require(status[0] == 0 && status[1] == 0, "exit 0");
    o.require(!a.empty() && a == b && ta == tb, "byte-identical reports");
  });

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
