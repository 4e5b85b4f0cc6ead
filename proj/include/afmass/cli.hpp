#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afmass/error.hpp"
#include "afmass/metric.hpp"

namespace afmass::cli {

inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

/// Invalid configuration. `pointer` is the JSON pointer of the offending value and
/// `line` its 1-based line in the source (0 when unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, const std::string& pointer, const std::string& message);
  int line() const noexcept { return line_; }
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  int line_;
  std::string pointer_;
};

struct MetricSpec {
  std::string type;  // schwarzschild | euclidean | conformal | table
  double mass = 0.0;
  std::string u;
  std::optional<double> r_min;
  bool horizon = false;  // conformal: start at the outermost minimal sphere
  std::filesystem::path path;
};

struct FlowSpec {
  std::optional<double> dt;
  std::optional<double> t_min;
  std::optional<double> t_max;
};

struct RunConfig {
  std::string command;  // describe | imcf | masses | capacity | verify | report, may be empty
  MetricSpec metric;
  std::vector<double> radii;    // mass ladder
  std::vector<double> volumes;  // t(v) table of the imcf command
  std::vector<double> p_values;
  std::vector<double> spheres;  // capacity and Bray-Miao spheres
  std::map<std::string, double> tolerances;
  FlowSpec flow;
  std::filesystem::path out_dir = ".";
  std::filesystem::path base_dir = ".";  // directory of the config file
  std::vector<std::string> formats{"json", "csv", "text"};
};

/// Parses and validates a JSON configuration. Unknown keys, wrong types, mass <= 0,
/// p outside (1, 3) and ladders that are not strictly increasing are ConfigErrors.
/// Relative table paths resolve against base_dir.
RunConfig parse_config(std::string_view text, const std::string& source = "config",
                       const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

geometry::RadialMetric build_metric(const RunConfig& config);

/// Canonical JSON of the effective configuration (sorted keys, flag overrides applied).
std::string canonical_json(const RunConfig& config);
/// Lowercase hex SHA-256 of canonical_json.
std::string config_hash(const RunConfig& config);

/// Full command line front end; returns the process exit status.
int run(int argc, const char* const* argv);

}  // namespace afmass::cli
