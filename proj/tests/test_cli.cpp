#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "doctest.h"
#include "vbi/commands.hpp"
#include "vbi/errors.hpp"

using namespace vbi;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vbi_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(VBI_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

AppConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

const char* kSmallSimulation =
    "[bridge]\nspan = 15\nnode_spacing = 0.5\n[traffic]\nn_vehicles = 10\n";

}  // namespace

TEST_CASE("config round trip") {
  AppConfig c;
  c.bridge.span = 50.0;
  c.vehicle.preset = "truck";
  c.vehicle.tire_damping = 120.0;
  c.traffic.density = 0.1;
  c.theory.gamma_points = 33;
  c.compare.spans = {15.0, 30.0};
  c.benchmark.include_strict = false;
  std::ostringstream os;
  write_config(os, c);
  const AppConfig d = parse(os.str());
  std::ostringstream again;
  write_config(again, d);
  CHECK(again.str() == os.str());
  CHECK(d.vehicle.tire_damping.value() == 120.0);
  CHECK(d.compare.spans.size() == 2);
}

TEST_CASE("config errors name the offending field") {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("[bridge]\nspam = 3\n").find("spam") != std::string::npos);
  CHECK(message("[bridges]\nspan = 3\n").find("bridges") != std::string::npos);
  CHECK(message("[theory]\ngamma_min = 10\ngamma_max = 1\n").find("theory.gamma_min") != std::string::npos);
  CHECK(message("[traffic]\ndensity = abc\n").find("density") != std::string::npos);
  CHECK(message("[vehicle]\npreset = bicycle\n").find("commercial") != std::string::npos);
  CHECK(message("[bridge]\nspan = 15\n").empty());
}

TEST_CASE("seed override") {
  AppConfig c;
  apply_seed(c, 41);
  CHECK(c.traffic.seed == 41);
  CHECK(c.roughness.seed == 42);
}

TEST_CASE("scenario from config") {
  AppConfig c = parse("[bridge]\nspan = 30\n[vehicle]\npreset = truck\nscale = 10\n[traffic]\nn_vehicles = 20\n");
  const ScenarioConfig s = build_scenario(c);
  CHECK(s.bridge.span == 30.0);
  CHECK(s.vehicle.sprung_mass == doctest::Approx(10.0 * heavy_truck().sprung_mass));
  CHECK(s.traffic.n_vehicles == 20);
  ScenarioOverrides o;
  o.span = 100.0;
  o.preset = "commercial";
  const ScenarioConfig t = build_scenario(c, o);
  CHECK(t.bridge.span == 100.0);
  CHECK(t.vehicle.unsprung_mass == doctest::Approx(10.0 * commercial_vehicle().unsprung_mass));
}

TEST_CASE("compare grid order") {
  AppConfig c;
  c.compare.spans = {15.0, 30.0};
  c.compare.n_vehicles = {0, 10};
  const auto g = compare_grid(c);
  REQUIRE(g.size() == 8);
  CHECK(g[0].vehicle == "commercial");
  CHECK(g[1].n_vehicles == 10);
  CHECK(g[2].span == 30.0);
  CHECK(g[4].vehicle == "truck");
}

TEST_CASE("parallel compare matches serial") {
  AppConfig c;
  c.compare.spans = {15.0, 30.0};
  c.compare.n_vehicles = {0, 20};
  c.compare.node_spacing = 0.5;
  const auto a = run_compare(c, 1), b = run_compare(c, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mse_time == b[i].mse_time);
    CHECK(a[i].mse_freq == b[i].mse_freq);
  }
}

TEST_CASE("cli: version and defaults") {
  const fs::path dir = scratch("version");
  CHECK(run("--version", dir / "log") == 0);
  CHECK(slurp(dir / "log").find(version()) != std::string::npos);
  CHECK(run("--print-default-config", dir / "cfg.ini") == 0);
  std::ifstream in(dir / "cfg.ini");
  CHECK_NOTHROW(parse_config(in));
}

TEST_CASE("cli: simulate and re-run from the manifest") {
  const fs::path dir = scratch("simulate");
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << kSmallSimulation;
  }
  const std::string first = (dir / "a").string(), second = (dir / "b").string();
  REQUIRE(run("simulate --config " + (dir / "run.ini").string() + " --seed 7 --emit-traces --out " + first, dir / "log") == 0);
  for (const char* f : {"bridge.csv", "vehicle.csv", "contact.csv", "roughness.csv", "traffic.csv", "manifest.ini"}) {
    CAPTURE(f);
    CHECK(fs::exists(fs::path(first) / f));
  }
  REQUIRE(run("simulate --config " + first + "/manifest.ini --emit-traces --out " + second, dir / "log2") == 0);
  for (const char* f : {"bridge.csv", "vehicle.csv", "contact.csv", "roughness.csv", "traffic.csv"}) {
    CAPTURE(f);
    CHECK(slurp(fs::path(first) / f) == slurp(fs::path(second) / f));
  }
  CHECK(slurp(fs::path(first) / "manifest.ini").find("seed = 8") != std::string::npos);
}

TEST_CASE("cli: exit codes") {
  const fs::path dir = scratch("codes");
  {
    std::ofstream bad(dir / "bad.ini");
    bad << "[theory]\ngamma_min = 10\ngamma_max = 1\n";
    std::ofstream preset(dir / "preset.ini");
    preset << "[vehicle]\npreset = bicycle\n";
    std::ofstream stuck(dir / "stuck.ini");
    stuck << kSmallSimulation << "[vehicle]\npreset = truck\nscale = 50\n[simulation]\nmax_iterations_per_step = 1\n";
  }
  CHECK(run("theory-sweep --config " + (dir / "bad.ini").string() + " --out " + (dir / "o").string(), dir / "log") == 1);
  CHECK(slurp(dir / "log").find("theory.gamma_min must not exceed theory.gamma_max") != std::string::npos);
  CHECK(run("simulate --config " + (dir / "preset.ini").string() + " --out " + (dir / "o").string(), dir / "log") == 1);
  CHECK(slurp(dir / "log").find("truck") != std::string::npos);
  CHECK(run("simulate --no-such-flag", dir / "log") == 1);
  CHECK(run("simulate --config " + (dir / "stuck.ini").string() + " --out " + (dir / "o").string(), dir / "log") == 2);
}

TEST_CASE("cli: theory sweep outputs") {
  const fs::path dir = scratch("sweep");
  REQUIRE(run("theory-sweep --out " + dir.string(), dir / "log") == 0);
  const std::string sweep = slurp(dir / "sweep.csv");
  std::size_t lines = 0;
  for (char ch : sweep) lines += ch == '\n';
  CHECK(lines == 3001);
  CHECK(fs::exists(dir / "sweep_axis.csv"));
  CHECK(slurp(dir / "sweep_peaks.csv").rfind("position,alpha,beta,max_error_pct,gamma_at_max", 0) == 0);
}

TEST_CASE("cli: output directory from the environment") {
  const fs::path dir = scratch("env");
  const std::string cmd = "VBI_OUTPUT_DIR=" + (dir / "envout").string() + " " + VBI_CLI_PATH +
                          " theory-sweep > " + (dir / "log").string() + " 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "envout" / "sweep.csv"));
}
