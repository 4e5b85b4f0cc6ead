#include "afmass/cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "afmass/capacity.hpp"
#include "afmass/format.hpp"
#include "afmass/imcf.hpp"
#include "afmass/masses.hpp"
#include "afmass/verify.hpp"
#include "json.hpp"

namespace afmass::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

ConfigError::ConfigError(const std::string& source, int line, const std::string& pointer, const std::string& message)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + (pointer.empty() ? "/" : pointer) +
            ": " + message),
      line_(line),
      pointer_(pointer) {}

namespace {

const std::vector<std::string> kCommands{"describe", "imcf", "masses", "capacity", "verify", "report"};

// JSON pointer -> 1-based line of the key (objects) or first character (array elements).
std::map<std::string, int> pointer_lines(std::string_view text) {
  struct Frame {
    bool object;
    std::string path;
    int index = 0;
    bool expect_key = true;
    bool pending = true;
    std::string key;
  };
  std::map<std::string, int> lines;
  std::vector<Frame> stack;
  int line = 1;
  auto child = [&]() -> std::string {
    if (stack.empty()) return "";
    const Frame& f = stack.back();
    return f.path + "/" + (f.object ? f.key : std::to_string(f.index));
  };
  auto element = [&] {
    if (!stack.empty() && !stack.back().object && stack.back().pending) {
      lines.emplace(child(), line);
      stack.back().pending = false;
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s += text[i];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        lines.emplace(child(), line);
      } else {
        element();
      }
    } else if (c == '{' || c == '[') {
      element();
      stack.push_back(Frame{c == '{', child(), 0, true, true, {}});
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().object) {
          stack.back().expect_key = true;
        } else {
          ++stack.back().index;
          stack.back().pending = true;
        }
      }
    } else if (!std::isspace(static_cast<unsigned char>(c)) && c != ':') {
      element();
    }
  }
  return lines;
}

class Reader {
 public:
  Reader(std::string source, std::map<std::string, int> lines) : source_(std::move(source)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& message) const {
    auto it = lines_.find(ptr);
    throw ConfigError(source_, it == lines_.end() ? 0 : it->second, ptr, message);
  }

  void keys(const Json& j, const std::string& ptr, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    for (const auto& [k, v] : j.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) fail(ptr + "/" + k, "unknown key '" + k + "'");
    }
  }

  double number(const Json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ptr, "expected a finite number");
    return v;
  }

  std::string string(const Json& j, const std::string& ptr) const {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
  }

  bool boolean(const Json& j, const std::string& ptr) const {
    if (!j.is_boolean()) fail(ptr, "expected true or false");
    return j.get<bool>();
  }

  std::vector<double> ladder(const Json& j, const std::string& ptr) const {
    if (!j.is_array() || j.empty()) fail(ptr, "expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = ptr + "/" + std::to_string(i);
      const double v = number(j[i], p);
      if (!(v > 0.0)) fail(p, "ladder values must be > 0");
      if (!out.empty() && !(v > out.back())) fail(p, "ladder must be strictly increasing");
      out.push_back(v);
    }
    return out;
  }

 private:
  std::string source_;
  std::map<std::string, int> lines_;
};

void parse_metric(const Reader& rd, const Json& j, RunConfig& cfg) {
  const std::string ptr = "/metric";
  if (!j.is_object()) rd.fail(ptr, "expected an object");
  if (!j.contains("type")) rd.fail(ptr, "missing key 'type'");
  auto& m = cfg.metric;
  m.type = rd.string(j["type"], ptr + "/type");
  if (m.type == "schwarzschild") {
    rd.keys(j, ptr, {"type", "mass"});
    if (!j.contains("mass")) rd.fail(ptr, "missing key 'mass'");
    m.mass = rd.number(j["mass"], ptr + "/mass");
    if (!(m.mass > 0.0)) rd.fail(ptr + "/mass", "mass must be > 0");
  } else if (m.type == "euclidean") {
    rd.keys(j, ptr, {"type"});
  } else if (m.type == "conformal") {
    rd.keys(j, ptr, {"type", "u", "r_min", "horizon"});
    if (!j.contains("u")) rd.fail(ptr, "missing key 'u'");
    m.u = rd.string(j["u"], ptr + "/u");
    try {
      (void)geometry::RadialExpression::parse(m.u);
    } catch (const ParseError& e) {
      rd.fail(ptr + "/u", e.what());
    }
    if (j.contains("r_min")) {
      m.r_min = rd.number(j["r_min"], ptr + "/r_min");
      if (*m.r_min < 0.0) rd.fail(ptr + "/r_min", "r_min must be >= 0");
    }
    if (j.contains("horizon")) m.horizon = rd.boolean(j["horizon"], ptr + "/horizon");
    if (m.horizon && m.r_min) rd.fail(ptr + "/horizon", "'horizon' and 'r_min' are exclusive");
  } else if (m.type == "table") {
    rd.keys(j, ptr, {"type", "path"});
    if (!j.contains("path")) rd.fail(ptr, "missing key 'path'");
    m.path = rd.string(j["path"], ptr + "/path");
  } else {
    rd.fail(ptr + "/type", "unknown metric type '" + m.type + "' (schwarzschild, euclidean, conformal, table)");
  }
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& source, const fs::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(source, line, "", std::string("malformed JSON: ") + e.what());
  }
  const Reader rd(source, pointer_lines(text));
  rd.keys(j, "", {"command", "metric", "ladders", "tolerances", "flow", "outputs"});

  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (j.contains("command")) {
    cfg.command = rd.string(j["command"], "/command");
    if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
      rd.fail("/command", "unknown command '" + cfg.command + "'");
    }
  }
  if (!j.contains("metric")) rd.fail("", "missing key 'metric'");
  parse_metric(rd, j["metric"], cfg);

  if (j.contains("ladders")) {
    const auto& l = j["ladders"];
    rd.keys(l, "/ladders", {"radii", "volumes", "p", "spheres"});
    if (l.contains("radii")) cfg.radii = rd.ladder(l["radii"], "/ladders/radii");
    if (l.contains("volumes")) cfg.volumes = rd.ladder(l["volumes"], "/ladders/volumes");
    if (l.contains("spheres")) cfg.spheres = rd.ladder(l["spheres"], "/ladders/spheres");
    if (l.contains("p")) {
      const auto& p = l["p"];
      if (!p.is_array() || p.empty()) rd.fail("/ladders/p", "expected a nonempty array of numbers");
      for (std::size_t i = 0; i < p.size(); ++i) {
        const std::string ptr = "/ladders/p/" + std::to_string(i);
        const double v = rd.number(p[i], ptr);
        if (!(v > 1.0 && v < 3.0)) rd.fail(ptr, "p = " + format_double(v) + " violates 1 < p < 3");
        cfg.p_values.push_back(v);
      }
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) rd.fail("/tolerances", "expected an object");
    for (const auto& [k, v] : t.items()) {
      const double x = rd.number(v, "/tolerances/" + k);
      if (x < 0.0) rd.fail("/tolerances/" + k, "tolerance must be >= 0");
      cfg.tolerances[k] = x;
    }
  }
  if (j.contains("flow")) {
    const auto& f = j["flow"];
    rd.keys(f, "/flow", {"dt", "t_min", "t_max"});
    if (f.contains("dt")) {
      cfg.flow.dt = rd.number(f["dt"], "/flow/dt");
      if (!(*cfg.flow.dt > 0.0)) rd.fail("/flow/dt", "dt must be > 0");
    }
    if (f.contains("t_min")) cfg.flow.t_min = rd.number(f["t_min"], "/flow/t_min");
    if (f.contains("t_max")) cfg.flow.t_max = rd.number(f["t_max"], "/flow/t_max");
    if (cfg.flow.t_min && cfg.flow.t_max && !(*cfg.flow.t_max > *cfg.flow.t_min)) {
      rd.fail("/flow/t_max", "t_max must exceed t_min");
    }
  }
  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    rd.keys(o, "/outputs", {"dir", "formats"});
    if (o.contains("dir")) cfg.out_dir = rd.string(o["dir"], "/outputs/dir");
    if (o.contains("formats")) {
      const auto& f = o["formats"];
      if (!f.is_array()) rd.fail("/outputs/formats", "expected an array of strings");
      cfg.formats.clear();
      for (std::size_t i = 0; i < f.size(); ++i) {
        const std::string ptr = "/outputs/formats/" + std::to_string(i);
        const std::string s = rd.string(f[i], ptr);
        if (s != "json" && s != "csv" && s != "text") rd.fail(ptr, "format must be json, csv or text");
        cfg.formats.push_back(s);
      }
    }
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot read configuration file");
  std::ostringstream text;
  text << in.rdbuf();
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return parse_config(text.str(), path.string(), base);
}

geometry::RadialMetric build_metric(const RunConfig& cfg) {
  using geometry::RadialMetric;
  const auto& m = cfg.metric;
  if (m.type == "schwarzschild") return RadialMetric::schwarzschild(m.mass);
  if (m.type == "euclidean") return RadialMetric::euclidean();
  if (m.type == "conformal") {
    const auto u = geometry::RadialExpression::parse(m.u);
    if (m.horizon) return geometry::conformal_exterior(u);
    return RadialMetric::conformal(u, m.r_min.value_or(0.0));
  }
  if (m.type == "table") return RadialMetric::from_csv(m.path.is_absolute() ? m.path : cfg.base_dir / m.path);
  throw DomainError("unknown metric type " + m.type);
}

std::string canonical_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["command"] = cfg.command;
  auto& m = j["metric"];
  m["type"] = cfg.metric.type;
  if (cfg.metric.type == "schwarzschild") m["mass"] = cfg.metric.mass;
  if (cfg.metric.type == "conformal") {
    m["u"] = cfg.metric.u;
    m["horizon"] = cfg.metric.horizon;
    if (cfg.metric.r_min) m["r_min"] = *cfg.metric.r_min;
  }
  if (cfg.metric.type == "table") m["path"] = cfg.metric.path.generic_string();
  j["ladders"] = {{"radii", cfg.radii}, {"volumes", cfg.volumes}, {"p", cfg.p_values}, {"spheres", cfg.spheres}};
  j["tolerances"] = cfg.tolerances;
  auto& f = j["flow"] = nlohmann::json::object();
  if (cfg.flow.dt) f["dt"] = *cfg.flow.dt;
  if (cfg.flow.t_min) f["t_min"] = *cfg.flow.t_min;
  if (cfg.flow.t_max) f["t_max"] = *cfg.flow.t_max;
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = canonical_json(cfg);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("config hash: SHA-256 failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

namespace {

/// An error raised by one pipeline stage, tagged with the module that failed.
struct StageError {
  std::string module;
  std::string message;
};

template <class F>
auto stage(const char* module, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError{module, e.what()};
  }
}

class Artifacts {
 public:
  Artifacts(fs::path dir, std::string hash, std::string generated_at)
      : dir_(std::move(dir)), hash_(std::move(hash)), generated_at_(std::move(generated_at)) {}

  const std::string& hash() const { return hash_; }

  /// JSON artifact with the config hash (and timestamp unless stable) in front.
  void json(const std::string& name, const Json& body) {
    Json j;
    j["config_hash"] = hash_;
    if (!generated_at_.empty()) j["generated_at"] = generated_at_;
    for (const auto& [k, v] : body.items()) j[k] = v;
    write(name, j.dump(2) + "\n");
  }

  /// CSV artifact; the first line is a comment carrying the config hash.
  void csv(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ostringstream out;
    out << "# config_hash " << hash_ << '\n';
    body(out);
    write(name, out.str());
  }

  void text(const std::string& name, const std::string& body) {
    write(name, "# config_hash " + hash_ + "\n" + body);
  }

  void remove_all() {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    written_.clear();
  }

 private:
  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    written_.push_back(p);
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw StageError{"cli", "cannot write " + p.string()};
  }

  fs::path dir_;
  std::string hash_;
  std::string generated_at_;
  std::vector<fs::path> written_;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

bool wants(const RunConfig& cfg, const char* format) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::vector<double> sphere_ladder(const geometry::RadialMetric& metric, const RunConfig& cfg) {
  std::vector<double> radii = cfg.spheres;
  if (radii.empty()) {
    radii = {0.5, 1.0, 2.0, 5.0, 10.0};
    if (!metric.complete()) radii.insert(radii.begin(), metric.r_min());
  }
  std::vector<double> out;
  for (double r : radii) {
    if (r >= metric.r_min() && r <= metric.r_max() && r > 0.0) out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> p_ladder(const RunConfig& cfg) {
  return cfg.p_values.empty() ? std::vector<double>{1.2, 1.5, 2.0} : cfg.p_values;
}

std::vector<double> mass_ladder(const RunConfig& cfg) { return cfg.radii.empty() ? masses::kDefaultMassLadder : cfg.radii; }

imcf::FlowOptions flow_options(const RunConfig& cfg) {
  imcf::FlowOptions o;
  if (cfg.flow.dt) o.dt = *cfg.flow.dt;
  if (cfg.flow.t_min) o.t_min = *cfg.flow.t_min;
  if (cfg.flow.t_max) o.t_max = *cfg.flow.t_max;
  return o;
}

Json describe(const geometry::RadialMetric& metric, const RunConfig& cfg) {
  Json j;
  j["metric"] = metric.description();
  j["kind"] = geometry::to_string(metric.kind());
  j["r_min"] = metric.r_min();
  j["r_max"] = number(metric.r_max());
  j["complete"] = metric.complete();
  j["boundary_minimal"] = metric.boundary_minimal();
  j["non_outward_minimizing_region"] = metric.has_non_outward_minimizing_region();
  j["conformal_factor"] = metric.has_conformal_factor();
  if (const auto m = metric.schwarzschild_mass()) j["schwarzschild_mass"] = *m;
  const double far = std::min(metric.r_max(), 1e3 * std::max(1.0, metric.r_min()));
  const auto scan = geometry::scan_scalar_curvature(metric, metric.r_min(), far);
  j["scalar_curvature"] = {{"min", scan.min_scalar}, {"at_r", scan.at_r}, {"nonnegative", scan.nonnegative},
                           {"samples", scan.samples}, {"range", {metric.r_min(), far}}};
  const auto flat = geometry::flatness_diagnostics(metric);
  j["flatness"] = {{"radii", flat.radii},
                   {"areal_deviation", flat.areal_deviation},
                   {"lapse_deviation", flat.lapse_deviation},
                   {"decreasing", flat.decreasing}};
  auto& spheres = j["spheres"] = Json::array();
  for (double r : sphere_ladder(metric, cfg)) {
    const auto d = geometry::sphere_data(metric, r);
    spheres.push_back({{"r", d.r},
                       {"area", d.area},
                       {"volume", d.volume},
                       {"mean_curvature", d.mean_curvature},
                       {"willmore", d.willmore},
                       {"hawking", d.hawking}});
  }
  return j;
}

Json run_imcf(const geometry::RadialMetric& metric, const RunConfig& cfg, Artifacts& out, bool plot) {
  verify::VerifyOptions opt;
  opt.flow = flow_options(cfg);
  const auto flow = stage("imcf", [&] { return verify::default_flow(metric, opt); });
  Json j = Json::parse(imcf::to_json(flow));
  if (!cfg.volumes.empty()) {
    auto& table = j["volume_times"] = Json::array();
    stage("imcf", [&] {
      for (double v : cfg.volumes) {
        const double t = imcf::t_of_v(flow, v);
        table.push_back({{"volume", v}, {"t", t}, {"r", flow.radius_at(t)}});
      }
      return 0;
    });
  }
  out.json("flow.json", j);
  if (wants(cfg, "csv")) out.csv("flow.csv", [&](std::ostream& s) { imcf::write_csv(flow, s); });
  if (plot) out.csv("plot/flow_curve.csv", [&](std::ostream& s) { imcf::write_csv(flow, s); });
  return j;
}

std::string slug(const masses::MassEstimate& e) {
  std::string s = masses::to_string(e.kind);
  if (e.kind == masses::MassKind::PIso || e.kind == masses::MassKind::PIsoAlt) s += "_p" + format_double(e.p);
  return s;
}

Json run_masses(const geometry::RadialMetric& metric, const RunConfig& cfg, Artifacts& out, bool plot) {
  const auto radii = mass_ladder(cfg);
  std::vector<masses::MassEstimate> est = stage("masses", [&] {
    std::vector<masses::MassEstimate> v;
    v.push_back(masses::iso_mass_limit(metric, radii));
    for (double p : p_ladder(cfg)) {
      v.push_back(masses::p_iso_mass_limit(metric, p, radii));
      v.push_back(masses::p_iso_mass_alt_limit(metric, p, radii));
    }
    v.push_back(masses::adm_mass_limit(masses::ChartMetric::from_radial(metric), radii));
    v.push_back(masses::hawking_mass_limit(metric, radii));
    return v;
  });
  Json j;
  j["metric"] = metric.description();
  auto& list = j["estimates"] = Json::array();
  std::ostringstream summary;
  for (const auto& e : est) {
    list.push_back(Json::parse(masses::to_json(e)));
    summary << std::left << std::setw(18) << slug(e) << format_double(e.limit()) << '\n';
    if (wants(cfg, "csv")) out.csv("ladder_" + slug(e) + ".csv", [&](std::ostream& s) { masses::write_ladder_csv(e, s); });
    if (plot) out.csv("plot/mass_ladder_" + slug(e) + ".csv", [&](std::ostream& s) { masses::write_ladder_csv(e, s); });
  }
  out.json("masses.json", j);
  std::cout << summary.str();
  return j;
}

Json run_capacity(const geometry::RadialMetric& metric, const RunConfig& cfg, Artifacts& out, bool plot) {
  Json j;
  j["metric"] = metric.description();
  auto& list = j["solutions"] = Json::array();
  for (double p : p_ladder(cfg)) {
    for (double r : sphere_ladder(metric, cfg)) {
      const auto sol = stage("capacity", [&] { return capacity::p_capacity_radial(metric, r, p); });
      list.push_back(Json::parse(capacity::to_json(sol)));
      std::cout << "p=" << format_double(p) << " r=" << format_double(r) << " ncap=" << format_double(sol.ncap)
                << '\n';
      if (plot) {
        out.csv("plot/potential_p" + format_double(p) + "_r" + format_double(r) + ".csv",
                [&](std::ostream& s) { capacity::write_potential_csv(sol, s); });
      }
    }
  }
  out.json("capacity.json", j);
  return j;
}

verify::VerificationReport run_verify(const geometry::RadialMetric& metric, const RunConfig& cfg) {
  verify::VerifyOptions opt;
  opt.mass_ladder = mass_ladder(cfg);
  opt.p_values = p_ladder(cfg);
  opt.sphere_ladder = cfg.spheres;
  opt.tolerances = cfg.tolerances;
  opt.flow = flow_options(cfg);
  return stage("verify", [&] { return verify::run_all(metric, opt); });
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"afmass: masses, flows and capacities of rotationally symmetric asymptotically flat metrics"};
  app.set_version_flag("--version", verify::kToolVersion);
  std::string command, config_path, out_dir;
  std::vector<std::string> tol;
  std::optional<double> ladder_max;
  bool stable = false, plot = false;
  app.add_option("command", command, "describe | imcf | masses | capacity | verify | report (default: from config)")
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config,-c", config_path, "JSON run configuration")->required();
  app.add_option("--tol", tol, "NAME=VALUE tolerance override for a check or entry (repeatable)");
  app.add_option("--ladder-max", ladder_max, "drop mass ladder radii above this value");
  app.add_option("--out,-o", out_dir, "output directory (overrides outputs.dir)");
  app.add_flag("--stable-output", stable, "omit timestamps so repeated runs are byte-identical");
  app.add_flag("--plot-data", plot, "write per-figure CSVs under plot/");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "afmass: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!command.empty()) cfg.command = command;
  if (cfg.command.empty()) {
    std::cerr << "afmass: no command given on the command line or in the config\n";
    return kExitUsage;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  for (const auto& item : tol) {
    const auto eq = item.find('=');
    double v = 0.0;
    try {
      if (eq == std::string::npos || eq == 0) throw std::invalid_argument(item);
      std::size_t used = 0;
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1 || !(v >= 0.0)) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      std::cerr << "afmass: --tol expects NAME=VALUE with VALUE >= 0, got '" << item << "'\n";
      return kExitUsage;
    }
    cfg.tolerances[item.substr(0, eq)] = v;
  }
  if (ladder_max) {
    auto radii = mass_ladder(cfg);
    std::erase_if(radii, [&](double r) { return r > *ladder_max; });
    if (radii.empty()) {
      std::cerr << "afmass: --ladder-max " << format_double(*ladder_max) << " removes every ladder radius\n";
      return kExitUsage;
    }
    cfg.radii = radii;
  }

  std::optional<geometry::RadialMetric> metric;
  try {
    metric = build_metric(cfg);
  } catch (const Error& e) {
    std::cerr << "afmass: metric: " << e.what() << '\n';
    return kExitData;
  }

  const fs::path dir = cfg.out_dir.is_absolute() ? cfg.out_dir : fs::path(cfg.out_dir);
  Artifacts out(dir, config_hash(cfg), stable ? std::string() : utc_now());
  try {
    const auto& m = *metric;
    if (cfg.command == "describe") {
      const Json d = stage("geometry", [&] { return describe(m, cfg); });
      out.json("describe.json", d);
      std::cout << d.dump(2) << '\n';
      return 0;
    }
    if (cfg.command == "imcf") {
      run_imcf(m, cfg, out, plot);
      return 0;
    }
    if (cfg.command == "masses") {
      run_masses(m, cfg, out, plot);
      return 0;
    }
    if (cfg.command == "capacity") {
      run_capacity(m, cfg, out, plot);
      return 0;
    }
    const verify::ReportMetadata meta{out.hash(), stable ? std::string() : utc_now()};
    if (cfg.command == "verify") {
      const auto report = run_verify(m, cfg);
      out.json("verify.json", Json::parse(verify::to_json(report, meta)));
      const std::string text = verify::to_text(report);
      if (wants(cfg, "text")) out.text("verify.txt", text);
      std::cout << text;
      return report.exit_code();
    }
    // report: every pipeline plus one consolidated verification report
    Json consolidated;
    consolidated["describe"] = stage("geometry", [&] { return describe(m, cfg); });
    consolidated["flow"] = run_imcf(m, cfg, out, plot);
    consolidated["masses"] = run_masses(m, cfg, out, plot);
    consolidated["capacity"] = run_capacity(m, cfg, out, plot);
    const auto report = run_verify(m, cfg);
    consolidated["verification"] = Json::parse(verify::to_json(report, meta));
    out.json("report.json", consolidated);
    const std::string text = verify::to_text(report);
    if (wants(cfg, "text")) out.text("report.txt", text);
    std::cout << text;
    return report.exit_code();
  } catch (const StageError& e) {
    out.remove_all();
    std::cerr << "afmass: " << e.module << ": " << e.message << '\n';
    return kExitData;
  }
}

}  // namespace afmass::cli
