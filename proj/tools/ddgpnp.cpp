#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ddgpnp/ddgpnp.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, numerical_fatal = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positivity-preserving DDG solver for Poisson-Nernst-Planck systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool override_admissibility = false;
  std::string cfl;
  int rk = 0;
  bool no_limiter = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
    sub->add_flag("--override-admissibility", override_admissibility,
                  "Allow NP flux parameters outside the positivity range");
    sub->add_option("--cfl", cfl, "CFL handling")->check(CLI::IsMember({"monitor", "strict", "adaptive"}));
    sub->add_option("--rk", rk, "Runge-Kutta order")->check(CLI::IsMember({1, 2}));
    sub->add_flag("--no-limiter", no_limiter, "Disable the scaling limiter");
  };
  CLI::App* run = app.add_subcommand("run", "Single run: diagnostics.csv and final snapshots");
  CLI::App* conv = app.add_subcommand("convergence", "Error table over the configured meshes: errors.csv");
  CLI::App* steady = app.add_subcommand("steady-check", "Per-step change from a steady construction: steady.csv");
  for (CLI::App* sub : {run, conv, steady}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    ddgpnp::ConfigOverrides ov;
    if (override_admissibility) ov.override_admissibility = true;
    if (!cfl.empty()) ov.cfl = ddgpnp::parse_cfl_mode(cfl);
    if (rk != 0) ov.rk = rk;
    if (no_limiter) ov.limiter = false;
    if (!out_dir.empty()) ov.output = out_dir;
    const ddgpnp::RunConfig config = ddgpnp::parse_config(ddgpnp::csv::read_file(config_path), ov);
    if (auto banner = ddgpnp::admissibility_banner(config)) std::cerr << *banner << "\n";

    if (*run) {
      ddgpnp::cmd_run(config, std::cout);
    } else if (*conv) {
      ddgpnp::cmd_convergence(config, std::cout);
    } else {
      ddgpnp::cmd_steady_check(config, std::cout);
    }
  } catch (const ddgpnp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const ddgpnp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return numerical_fatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return ok;
}
