#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "afmass/imcf.hpp"
#include "afmass/masses.hpp"

namespace afmass::verify {

using geometry::RadialMetric;

inline constexpr const char* kToolVersion = "0.1.0";

enum class Status { Pass, Fail, Inconclusive, Skipped, AssumptionViolated, Informational };

std::string to_string(Status status);

/// One named comparison lhs <= rhs. Equality entries store lhs = |a - b| and rhs = 0.
/// A graded entry passes iff margin = rhs - lhs >= -tolerance.
struct CheckEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  Status status = Status::Skipped;
  std::vector<std::string> assumptions;
  std::string note;
};

struct VerificationReport {
  std::string metric;
  std::vector<double> mass_ladder;
  std::vector<double> sphere_ladder;
  std::vector<double> p_values;
  std::vector<CheckEntry> checks;  // sorted by name

  void add(std::vector<CheckEntry> entries);
  /// Entries that actually compared numbers (pass, fail or inconclusive).
  int graded() const;
  /// 0 all graded entries pass, 1 any fail, 2 any inconclusive and none failing.
  int exit_code() const;
};

struct VerifyOptions {
  std::vector<double> mass_ladder = masses::kDefaultMassLadder;
  std::vector<double> p_values{1.2, 1.5, 2.0};
  /// Spheres for the capacity comparison; empty selects {0.5, 1, 2, 5, 10} plus r_min.
  std::vector<double> sphere_ladder;
  int volume_points = 30;
  int profile_points = 50;
  /// Overrides keyed by entry name or by the check prefix before the first '.' or '['.
  std::map<std::string, double> tolerances;
  imcf::FlowOptions flow;
};

/// Tolerance for an entry: exact name, then its check prefix, then the fallback.
double tolerance_for(const VerifyOptions& options, const std::string& entry, double fallback);

/// Weak IMCF from the pole of a complete metric, else from the boundary sphere.
imcf::FlowRecord default_flow(const RadialMetric& metric, const VerifyOptions& options);

std::vector<CheckEntry> check_penrose(const RadialMetric& metric, const VerifyOptions& options = {});
std::vector<CheckEntry> check_geroch(const RadialMetric& metric, const imcf::FlowRecord& flow,
                                     const VerifyOptions& options = {});
std::vector<CheckEntry> check_shi(const RadialMetric& metric, const VerifyOptions& options = {});
std::vector<CheckEntry> check_asymptotic_comparison(const RadialMetric& metric, const imcf::FlowRecord& flow,
                                                    const VerifyOptions& options = {});
std::vector<CheckEntry> check_profile_chain(const RadialMetric& metric, const VerifyOptions& options = {});
std::vector<CheckEntry> check_mass_equivalence(const RadialMetric& metric, const VerifyOptions& options = {});
std::vector<CheckEntry> check_bray_miao(const RadialMetric& metric, const VerifyOptions& options = {});
std::vector<CheckEntry> check_profile_monotonicity(const RadialMetric& metric, const VerifyOptions& options = {});

/// Every check above on one metric. The flow is shared by the flow-based checks; when
/// it cannot be built those checks are reported with the failure as their note.
VerificationReport run_all(const RadialMetric& metric, const VerifyOptions& options = {});

struct ReportMetadata {
  std::string config_hash;
  std::string generated_at;  // omitted when empty
};

std::string to_json(const VerificationReport& report, const ReportMetadata& metadata = {}, int indent = 2);
std::string to_text(const VerificationReport& report);

}  // namespace afmass::verify
