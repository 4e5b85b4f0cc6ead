#include <filesystem>
#include <fstream>
#include <sstream>

#include "afmass/cli.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace afmass;
using namespace afmass::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("afmass_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "afmass");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("configuration parsing") {
  const auto cfg = parse_config(R"({"command": "masses", "metric": {"type": "schwarzschild", "mass": 2},
    "ladders": {"radii": [10, 100, 1000, 10000], "p": [1.5]}, "tolerances": {"penrose": 1e-3}})");
  CHECK(cfg.command == "masses");
  CHECK(cfg.metric.mass == 2.0);
  CHECK(cfg.radii.size() == 4);
  CHECK(cfg.tolerances.at("penrose") == 1e-3);
  CHECK(build_metric(cfg).schwarzschild_mass() == 2.0);

  const auto horizon = parse_config(R"({"metric": {"type": "conformal", "u": "1 + 0.5/r", "horizon": true}})");
  CHECK(std::abs(build_metric(horizon).r_min() - 0.5) < 1e-9);
}

TEST_CASE("configuration errors carry pointer and line") {
  auto error_of = [](const std::string& text) {
    try {
      parse_config(text, "cfg.json");
    } catch (const ConfigError& e) {
      return std::make_tuple(e.pointer(), e.line(), std::string(e.what()));
    }
    return std::make_tuple(std::string("none"), -1, std::string());
  };
  {
    const auto [ptr, line, msg] = error_of("{\n  \"metric\": {\"type\": \"euclidean\"},\n  \"extra\": 1\n}");
    CHECK(ptr == "/extra");
    CHECK(line == 3);
    CHECK(msg.find("cfg.json:3") == 0);
    CHECK(msg.find("unknown key") != std::string::npos);
  }
  {
    const auto [ptr, line, msg] = error_of("{\"metric\": {\"type\": \"euclidean\"},\n\"ladders\": {\"p\": [1.5,\n 3.5]}}");
    CHECK(ptr == "/ladders/p/1");
    CHECK(line == 3);
    CHECK(msg.find("1 < p < 3") != std::string::npos);
  }
  CHECK(std::get<0>(error_of(R"({"metric": {"type": "schwarzschild", "mass": -1}})")) == "/metric/mass");
  CHECK(std::get<0>(error_of(R"({"metric": {"type": "schwarzschild", "mass": 1, "m": 1}})")) == "/metric/m");
  CHECK(std::get<0>(error_of(R"({"metric": {"type": "euclidean"}, "ladders": {"radii": [10, 5]}})")) ==
        "/ladders/radii/1");
  CHECK(std::get<0>(error_of(R"({"metric": {"type": "conformal", "u": "1 + "}})")) == "/metric/u");
  CHECK(std::get<0>(error_of(R"({"metric": {"type": "kerr"}})")) == "/metric/type");
  CHECK(std::get<0>(error_of(R"({"command": "plot", "metric": {"type": "euclidean"}})")) == "/command");
  CHECK(std::get<0>(error_of(R"({"ladders": {}})")) == "");
  const auto [ptr, line, msg] = error_of("{\n\"metric\": {\"type\": \"euclidean\"},,\n}");
  CHECK(line == 2);
  CHECK(msg.find("malformed JSON") != std::string::npos);
}

TEST_CASE("config hash") {
  const auto a = parse_config(R"({"metric": {"type": "schwarzschild", "mass": 1}, "outputs": {"dir": "x"}})");
  const auto b = parse_config(R"({"outputs": {"dir": "y"}, "metric": {"mass": 1.0, "type": "schwarzschild"}})");
  const auto c = parse_config(R"({"metric": {"type": "schwarzschild", "mass": 1.5}})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 64);
}

TEST_CASE("masses on Euclidean space") {
  const auto dir = scratch("masses");
  const auto cfg = write_file(dir / "e.json", R"({"command": "masses", "metric": {"type": "euclidean"}})");
  CHECK(invoke({"--config", cfg.string(), "--out", (dir / "out").string(), "--stable-output", "--plot-data"}) == 0);
  const auto j = nlohmann::json::parse(read_file(dir / "out" / "masses.json"));
  CHECK(j["config_hash"].get<std::string>().size() == 64);
  CHECK(j["estimates"].size() == 9);
  for (const auto& e : j["estimates"]) CHECK(std::abs(e["extrapolation"]["limit"].get<double>()) < 1e-6);
  CHECK(fs::exists(dir / "out" / "plot" / "mass_ladder_iso.csv"));
  CHECK(read_file(dir / "out" / "ladder_iso.csv").rfind("# config_hash ", 0) == 0);
}

TEST_CASE("usage and data errors") {
  const auto dir = scratch("errors");
  const auto bad = write_file(dir / "bad.json", R"({"metric": {"type": "euclidean"}, "ladders": {"p": [3.5]}})");
  CHECK(invoke({"masses", "--config", bad.string()}) == kExitUsage);
  const auto ok = write_file(dir / "ok.json", R"({"metric": {"type": "euclidean"}})");
  CHECK(invoke({"--config", ok.string()}) == kExitUsage);  // no command
  CHECK(invoke({"masses"}) == kExitUsage);                 // no config
  CHECK(invoke({"masses", "--config", ok.string(), "--tol", "oops"}) == kExitUsage);
  CHECK(invoke({"masses", "--config", ok.string(), "--ladder-max", "1"}) == kExitUsage);
  const auto missing = write_file(dir / "t.json", R"({"metric": {"type": "table", "path": "nope.csv"}})");
  CHECK(invoke({"describe", "--config", missing.string()}) == kExitData);

  // p = 2.9 < 2.95 < 3 passes the config gate but not the capacity solver; files written
  // before the failure are removed.
  const auto late = write_file(dir / "late.json", R"({"metric": {"type": "euclidean"}, "ladders": {"p": [1.5, 2.95]}})");
  CHECK(invoke({"capacity", "--config", late.string(), "--out", (dir / "out").string(), "--plot-data"}) == kExitData);
  CHECK((!fs::exists(dir / "out" / "plot") || fs::is_empty(dir / "out" / "plot")));
}

TEST_CASE("verify and determinism") {
  const auto dir = scratch("verify");
  const auto cfg = write_file(dir / "s.json", R"({"command": "verify", "metric": {"type": "schwarzschild", "mass": 1.0}})");
  CHECK(invoke({"--config", cfg.string(), "--out", (dir / "a").string(), "--stable-output"}) == 0);
  CHECK(invoke({"--config", cfg.string(), "--out", (dir / "b").string(), "--stable-output"}) == 0);
  const auto a = read_file(dir / "a" / "verify.json");
  CHECK(a == read_file(dir / "b" / "verify.json"));
  const auto j = nlohmann::json::parse(a);
  bool penrose = false;
  for (const auto& e : j["checks"]) {
    if (e["name"] == "penrose") penrose = e["status"] == "pass";
  }
  CHECK(penrose);
  CHECK_FALSE(j.contains("generated_at"));
  CHECK(invoke({"--config", cfg.string(), "--out", (dir / "c").string()}) == 0);
  CHECK(nlohmann::json::parse(read_file(dir / "c" / "verify.json")).contains("generated_at"));
}
