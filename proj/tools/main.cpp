// vbi: command line front end for the vehicle-bridge interaction engine.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "vbi/commands.hpp"
#include "vbi/errors.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

void add_common(CLI::App* cmd, vbi::RunOptions& o, std::string& out, std::uint64_t& seed, bool& strict) {
  cmd->add_option("--config", o.config_path, "INI config file (defaults are built in)")->check(CLI::ExistingFile);
  cmd->add_option("--out", out, "output directory (env VBI_OUTPUT_DIR, default ./vbi-out)");
  cmd->add_option("--seed", seed, "seed for traffic (seed) and roughness (seed + 1)");
  cmd->add_flag("--emit-traces", o.emit_traces, "also write response traces / excitation CSVs");
  cmd->add_flag("--strict-paper-mode", strict, "re-solve the full bridge history in every iteration");
  cmd->add_option("--jobs", o.jobs, "worker threads for compare")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicle-bridge interaction simulator: coupled vs decoupled VBI, 2-DOF theory, benchmarks"};
  app.set_version_flag("--version", vbi::version());
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-default-config", print_defaults, "print the built-in configuration and exit");

  vbi::RunOptions opts;
  std::string out;
  std::uint64_t seed = 0;
  bool strict = false;
  auto* sweep = app.add_subcommand("theory-sweep", "closed-form coupled vs uncoupled error surface");
  auto* simulate = app.add_subcommand("simulate", "one coupled or decoupled run");
  auto* compare = app.add_subcommand("compare", "paired coupled/decoupled MSE over a span x traffic x vehicle grid");
  auto* bench = app.add_subcommand("benchmark", "runtime of coupled vs decoupled drivers");
  auto* validate = app.add_subcommand("validate", "built-in verification checks");
  for (auto* cmd : {sweep, simulate, compare, bench}) add_common(cmd, opts, out, seed, strict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (print_defaults) {
      vbi::write_config(std::cout, vbi::AppConfig{});
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cout << app.help();
      return kConfigError;
    }
    CLI::App* cmd = app.get_subcommands().front();
    if (cmd == validate) return vbi::cmd_validate(std::cout);
    if (!out.empty()) {
      opts.output_dir = out;
    } else if (const char* env = std::getenv("VBI_OUTPUT_DIR"); env && *env) {
      opts.output_dir = env;
    }
    if (cmd->count("--seed")) opts.seed = seed;
    if (strict) opts.strict_paper_mode = true;

    if (cmd == sweep) return vbi::cmd_theory_sweep(opts, std::cout);
    if (cmd == simulate) return vbi::cmd_simulate(opts, std::cout);
    if (cmd == compare) return vbi::cmd_compare(opts, std::cout);
    if (cmd == bench) return vbi::cmd_benchmark(opts, std::cout);
  } catch (const vbi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kRuntimeError;
}
