#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "afmass/extrapolation.hpp"
#include "afmass/geometry.hpp"

namespace afmass::masses {

using geometry::RadialMetric;

enum class MassKind { Iso, PIso, PIsoAlt, Adm, HawkingLimit };

std::string to_string(MassKind kind);

struct MassAssumptions {
  bool scalar_nonnegative = false;  // Scal >= 0 on the sample grid
  double min_scalar = 0.0;
  bool boundary_minimal = false;
};

/// Finite-scale mass values on a radius ladder plus the 1/scale extrapolation.
/// Coordinate spheres form the exhaustion, so every value is a radial-exhaustion estimate.
struct MassEstimate {
  MassKind kind = MassKind::Iso;
  double p = 0.0;  // exponent for the p-isocapacitary kinds, 0 otherwise
  std::vector<numerics::ScaleValue> samples;
  std::optional<numerics::ExtrapolationResult> extrapolation;
  MassAssumptions assumptions;
  std::string label = "radial-exhaustion estimate";

  /// Extrapolated limit when available, else the last sample.
  double limit() const;
};

/// (2/area) (volume - area^{3/2} / (6 sqrt(pi))).
double iso_mass_quotient(double volume, double area);
/// (volume - (4pi/3) ncap^{3/(3-p)}) / (2 p pi ncap^{2/(3-p)}).
double p_iso_mass_quotient(double volume, double ncap, double p);
/// 2 ncap^{(p-2)/(3-p)} / (p (3-p)) * ((3 volume / 4pi)^{(3-p)/3} - ncap).
double p_iso_mass_alt_quotient(double volume, double ncap, double p);

struct LadderOptions {
  int order = 1;
  numerics::QuadratureOptions quadrature{1e-12};
};

inline const std::vector<double> kDefaultMassLadder{1e2, 1e3, 1e4, 1e5};

/// The ladder must be strictly increasing, lie inside the metric domain beyond r_min and
/// span at least two decades (four radii are needed for extrapolation).
MassEstimate iso_mass_limit(const RadialMetric& metric, const std::vector<double>& radii = kDefaultMassLadder,
                            const LadderOptions& options = {});
MassEstimate p_iso_mass_limit(const RadialMetric& metric, double p,
                              const std::vector<double>& radii = kDefaultMassLadder, const LadderOptions& options = {});
MassEstimate p_iso_mass_alt_limit(const RadialMetric& metric, double p,
                                  const std::vector<double>& radii = kDefaultMassLadder,
                                  const LadderOptions& options = {});
/// Hawking mass of the coordinate spheres on the ladder.
MassEstimate hawking_mass_limit(const RadialMetric& metric, const std::vector<double>& radii = kDefaultMassLadder,
                                const LadderOptions& options = {});

/// Chart data at a point: g_ij and dg[k](i, j) = d_k g_ij.
struct ChartSample {
  Eigen::Matrix3d g;
  std::array<Eigen::Matrix3d, 3> dg;
};

using ChartFunction = std::function<ChartSample(const Eigen::Vector3d&)>;

/// A metric in an asymptotically flat chart, evaluated pointwise.
class ChartMetric {
 public:
  ChartMetric(ChartFunction sample, std::string description);

  static ChartMetric flat();
  /// g = a delta + b n n with a = (areal/r)^2, b = lapse^2 - a, n = x/|x|.
  static ChartMetric from_radial(const RadialMetric& metric);
  /// g = u^4 delta for a conformal factor with its gradient.
  static ChartMetric conformal(std::function<double(const Eigen::Vector3d&)> u,
                               std::function<Eigen::Vector3d(const Eigen::Vector3d&)> grad_u,
                               std::string description);

  ChartSample operator()(const Eigen::Vector3d& x) const { return sample_(x); }
  const std::string& description() const noexcept { return description_; }
  /// Smallest coordinate radius where the chart is defined; sphere evaluations below it are rejected.
  double r_min = 0.0;

 private:
  ChartFunction sample_;
  std::string description_;
};

struct FluxOptions {
  int polar = 32;
  int azimuthal = 64;
  /// Successive order doublings must agree to tolerance * max(1, |flux|).
  double tolerance = 1e-9;
  int max_doublings = 4;
};

struct FluxResult {
  double value = 0.0;
  int polar = 0;
  int azimuthal = 0;
  double disagreement = 0.0;
};

/// (1/16pi) oint g^{ij} (d_i g_jk - d_k g_ij) nu^k dsigma_g over the coordinate sphere |x| = r,
/// by Gauss-Legendre in cos(theta) times the uniform rule in the azimuth. The order is
/// doubled until two successive values agree; ConvergenceError otherwise.
FluxResult adm_flux(const ChartMetric& chart, double r, const FluxOptions& options = {});

inline const std::vector<double> kDefaultAdmLadder{1e2, 1e3, 1e4, 1e5};

MassEstimate adm_mass_limit(const ChartMetric& chart, const std::vector<double>& radii = kDefaultAdmLadder,
                            const FluxOptions& options = {}, int order = 1);

std::string to_json(const MassEstimate& estimate, int indent = 2);
/// CSV header `scale,value`.
void write_ladder_csv(const MassEstimate& estimate, std::ostream& out);

}  // namespace afmass::masses
