#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "ddgpnp/commands.hpp"
#include "random_fields.hpp"

using namespace ddgpnp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ddgpnp_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv::read_file(p.string()));
  std::string line;
  while (std::getline(in, line)) rows.push_back(csv::split(line));
  return rows;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(DDGPNP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, MinimalExample1GetsDefaults) {
  const RunConfig c = parse_config("benchmark = example1\n");
  EXPECT_EQ(c.np_flux.beta0, 4.0);
  EXPECT_EQ(c.np_flux.beta1, 1.0 / 6.0);
  EXPECT_EQ(c.poisson_flux.beta0, 4.0);
  EXPECT_EQ(c.poisson_flux.beta1, 1.0 / 6.0);
  EXPECT_EQ(c.mu, 0.01);
  EXPECT_EQ(c.dt, 0.0);
  EXPECT_EQ(c.rk, 2);
  EXPECT_TRUE(c.limiter);
  EXPECT_EQ(c.cells, (std::vector<int>{5, 10, 20, 40}));
}

TEST(Config, EmptyFileNeedsBenchmark) {
  EXPECT_NE(config_error("").find("benchmark id required"), std::string::npos);
  EXPECT_NE(config_error("# only a comment\n\n").find("benchmark id required"), std::string::npos);
}

TEST(Config, Beta1OutsidePositivityRangeIsRejected) {
  const std::string msg = config_error("benchmark = example1\nbeta1 = 0.04\n");
  EXPECT_NE(msg.find("[1/8, 1/4]"), std::string::npos) << msg;
  ConfigOverrides ov;
  ov.override_admissibility = true;
  const RunConfig c = parse_config("benchmark = example1\nbeta1 = 0.04\n", ov);
  EXPECT_EQ(c.np_flux.beta1, 0.04);
  EXPECT_TRUE(admissibility_banner(c).has_value());
  EXPECT_FALSE(admissibility_banner(parse_config("benchmark = example1\n")).has_value());
  EXPECT_TRUE(parse_config("benchmark = example1\n[solver]\noverride_admissibility = true\n[np_flux]\nbeta1 = 1/24\n")
                  .override_admissibility);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(config_error("benchmark = example1\n[time]\nfoo = 1\n").find("line 3: unknown key 'time.foo'"),
            std::string::npos);
  EXPECT_NE(config_error("benchmark = example1\n\n[time]\nmu = fast\n").find("line 4: type mismatch"),
            std::string::npos);
  EXPECT_NE(config_error("benchmark = example1\n[mesh]\ncells = 4, x\n").find("line 3"), std::string::npos);
  EXPECT_NE(config_error("benchmark = nope\n").find("line 1: unknown benchmark"), std::string::npos);
  EXPECT_NE(config_error("benchmark = example1\n[time\n").find("line 2"), std::string::npos);
  EXPECT_NE(config_error("benchmark = example1\nvariant = 2\nvariant = 3\n").find("line 3: duplicate"),
            std::string::npos);
  EXPECT_NE(config_error("benchmark = example1\njunk\n").find("line 2"), std::string::npos);
  EXPECT_NE(config_error("benchmark = example1\n[solver]\nlimiter = maybe\n").find("line 3"), std::string::npos);
}

TEST(Config, FractionsAndComments) {
  const RunConfig c = parse_config("benchmark = example1  # trailing\n[np_flux]\nbeta1 = 1/4\n[time]\ndt = 1/1000\n");
  EXPECT_EQ(c.np_flux.beta1, 0.25);
  EXPECT_EQ(c.dt, 1e-3);
  EXPECT_FALSE(config_error("benchmark = example1\n[time]\nmu = 1/0\n").empty());
}

TEST(Config, BenchmarkDefaults) {
  const RunConfig e3 = parse_config("benchmark = example3-3\n");
  EXPECT_EQ(e3.np_flux.beta0, 16.0);
  EXPECT_EQ(e3.mu, 1.6e-5);
  EXPECT_EQ(e3.dimension(), 2);
  EXPECT_EQ(e3.example3_case(), 3);
  const RunConfig e4 = parse_config("benchmark = example4\n");
  EXPECT_EQ(e4.dt, 1e-5);
  EXPECT_EQ(e4.final_time, 0.1);
  EXPECT_EQ(e4.cells, std::vector<int>{20});
  EXPECT_EQ(parse_config("benchmark = custom\n[custom]\ndim = 2\n").dimension(), 2);
  EXPECT_FALSE(config_error("benchmark = example3-4\nvariant = 4\n").empty());
}

TEST(Config, CommandLineOverridesWin) {
  ConfigOverrides ov;
  ov.cfl = CflMode::strict;
  ov.rk = 1;
  ov.limiter = false;
  ov.output = "elsewhere";
  const RunConfig c = parse_config("benchmark = example2\n[solver]\ncfl = adaptive\n[output]\ndirectory = here\n", ov);
  EXPECT_EQ(c.cfl, CflMode::strict);
  EXPECT_EQ(c.rk, 1);
  EXPECT_FALSE(c.limiter);
  EXPECT_EQ(c.output, "elsewhere");
}

TEST(Config, RoundTripIsIdentity) {
  for (const auto& id : benchmark_ids()) {
    const RunConfig c = parse_config("benchmark = " + id + "\n");
    EXPECT_EQ(parse_config(serialize(c)), c) << id;
    EXPECT_EQ(serialize(parse_config(serialize(c))), serialize(c)) << id;
  }
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    RunConfig c = benchmark_defaults(benchmark_ids()[static_cast<std::size_t>(trial) % benchmark_ids().size()]);
    c.cells = {1 + static_cast<int>(u(rng) * 50), 1 + static_cast<int>(u(rng) * 50)};
    c.np_flux = {1.0 + 20.0 * u(rng), 0.125 + 0.125 * u(rng)};
    c.poisson_flux = {20.0 * u(rng), u(rng)};
    c.dt = u(rng) < 0.5 ? 0.0 : u(rng) * 1e-3;
    c.mu = u(rng);
    c.final_time = u(rng);
    c.rk = u(rng) < 0.5 ? 1 : 2;
    c.cadence = 1 + static_cast<std::size_t>(u(rng) * 9);
    c.limiter = u(rng) < 0.5;
    c.cfl = static_cast<CflMode>(static_cast<int>(u(rng) * 3));
    c.value = 0.1 + u(rng);
    c.perturbation = u(rng) * 1e-2;
    c.settle_time = u(rng);
    c.steady_mode = static_cast<SteadyMode>(static_cast<int>(u(rng) * 4));
    c.output = "dir_" + std::to_string(trial);
    EXPECT_EQ(parse_config(serialize(c)), c) << serialize(c);
  }
}

TEST(Csv, NumbersRoundTrip) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::pow(10.0, u(rng)) * (i % 2 ? -1.0 : 1.0);
    EXPECT_EQ(csv::parse_number(csv::number(v)), v);
  }
  EXPECT_EQ(csv::number(0.2), "0.2");
  EXPECT_EQ(csv::number(std::nan("")), "nan");
}

TEST(Csv, SnapshotRoundTripIsExact) {
  std::mt19937 rng(11);
  auto sp2 = make_space(build_mesh_2d(1.0, 2.0, 3, 4));
  const auto u = ddgpnp::testing::random_field<2>(sp2, rng, 0.5, 1.5, 0.3);
  const auto back = csv::read_snapshot<2>(csv::snapshot(u), sp2);
  EXPECT_EQ(back.coefficients(), u.coefficients());
  const auto text = csv::snapshot(u);
  EXPECT_EQ(text.substr(0, text.find('\n')), "cell,a0,a1,a2,a3,a4,a5");
  auto sp1 = make_space(build_mesh_1d(0.0, 1.0, 4));
  EXPECT_THROW(csv::read_snapshot<1>(text, sp1), NumericalError);
}

TEST(Commands, ConvergenceNeedsTwoMeshes) {
  RunConfig c = parse_config("benchmark = example1\n[mesh]\ncells = 10\n");
  std::ostringstream log;
  EXPECT_THROW(cmd_convergence(c, log), ConfigError);
}

TEST(Commands, ErrorsCsvOrdersAreRecomputable) {
  const auto dir = scratch("conv");
  RunConfig c = parse_config("benchmark = example1\n[mesh]\ncells = 5, 10, 20\n");
  c.output = dir.string();
  std::ostringstream log;
  const auto rows = cmd_convergence(c, log);
  ASSERT_EQ(rows.size(), 3u);
  const auto table = read_csv(dir / "errors.csv");
  ASSERT_EQ(table.size(), 4u);
  EXPECT_EQ(csv::join(table[0]), "h,err_c1,order_c1,err_c2,order_c2,err_psi,order_psi");
  EXPECT_EQ(table[1][2], "");
  for (std::size_t r = 2; r < table.size(); ++r) {
    const double hc = csv::parse_number(table[r - 1][0]);
    const double hf = csv::parse_number(table[r][0]);
    for (std::size_t col = 1; col < table[r].size(); col += 2) {
      const double ec = csv::parse_number(table[r - 1][col]);
      const double ef = csv::parse_number(table[r][col]);
      const double order = std::log(ec / ef) / std::log(hc / hf);
      EXPECT_NEAR(csv::parse_number(table[r][col + 1]), order, 1e-9);
    }
  }
  // Table shape of the (4, 1/6) Example 1 study at t = 0.01.
  EXPECT_NEAR(rows[1].errors[0], 5.7965e-5, 1e-8);
  EXPECT_NEAR(rows[2].errors[0], 9.8083e-6, 1e-9);
}

TEST(Commands, RunWritesDeclaredColumnsDeterministically) {
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  RunConfig c = parse_config("benchmark = example2\n[mesh]\ncells = 10\n[time]\nfinal_time = 0.05\ncadence = 7\n");
  std::ostringstream log;
  c.output = a.string();
  cmd_run(c, log);
  c.output = b.string();
  cmd_run(c, log);
  for (const char* f : {"diagnostics.csv", "snapshot_c1.csv", "snapshot_c2.csv", "snapshot_psi.csv"}) {
    EXPECT_EQ(csv::read_file((a / f).string()), csv::read_file((b / f).string())) << f;
  }
  const auto table = read_csv(a / "diagnostics.csv");
  EXPECT_EQ(csv::join(table[0]),
            "t,mass_c1,mass_c2,energy,min_avg_c1,min_avg_c2,min_g_c1,min_g_c2,theta_count,mu0");
  for (std::size_t r = 1; r < table.size(); ++r) {
    EXPECT_NEAR(csv::parse_number(table[r][1]), 3.0, 1e-10);
    EXPECT_NEAR(csv::parse_number(table[r][2]), 3.0, 1e-10);
    if (r > 2) {
      EXPECT_LE(csv::parse_number(table[r][3]), csv::parse_number(table[r - 1][3]) + 1e-8);
    }
  }
  EXPECT_EQ(csv::parse_number(table.back()[0]), 0.05);
}

TEST(Commands, ZeroFinalTimeGivesSingleRow) {
  const auto dir = scratch("t0");
  RunConfig c = parse_config("benchmark = example4\n[mesh]\ncells = 4\n[time]\nfinal_time = 0\n");
  c.output = dir.string();
  std::ostringstream log;
  const auto r = cmd_run(c, log);
  EXPECT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(read_csv(dir / "diagnostics.csv").size(), 2u);
}

TEST(Commands, SteadyCheckNeutralStateIsExact) {
  for (int dim : {1, 2}) {
    RunConfig c = parse_config("benchmark = custom\n[custom]\ndim = " + std::to_string(dim) + "\nvalue = 1.7\n");
    c.output = scratch("steady_n").string();
    c.dt = 10.0 / 64.0;  // 10 h^2 on 8 cells
    std::ostringstream log;
    const auto rep = cmd_steady_check(c, log);
    EXPECT_EQ(rep.changes.size(), 100u);
    EXPECT_LE(rep.max_change, 1e-13) << dim;
  }
}

TEST(Commands, SteadyCheckPerturbedStateRelaxesMonotonically) {
  for (int dim : {1, 2}) {
    RunConfig c = parse_config("benchmark = custom\n[custom]\ndim = " + std::to_string(dim) +
                               "\n[steady]\nmode = perturbed\nperturbation = 0.05\n");
    c.output = scratch("steady_p").string();
    std::ostringstream log;
    const auto rep = cmd_steady_check(c, log);
    EXPECT_TRUE(rep.monotone) << dim;
    EXPECT_LT(rep.changes.back(), rep.changes.front());
    EXPECT_GT(rep.changes.back(), 0.0);
  }
}

TEST(Commands, SteadyCheckExample2FromUnitTime) {
  RunConfig c = parse_config("benchmark = example2\n[mesh]\ncells = 10\n");
  c.output = scratch("steady_e2").string();
  std::ostringstream log;
  const auto rep = cmd_steady_check(c, log);
  EXPECT_LE(rep.max_change, 1e-8);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  const auto write = [&](const std::string& name, const std::string& text) {
    csv::write_file((dir / name).string(), text);
    return (dir / name).string();
  };
  const std::string out = " --out " + (dir / "out").string();
  EXPECT_EQ(cli("run --config " + write("empty.cfg", "") + out), 2);
  EXPECT_EQ(cli("run --config " + write("b.cfg", "benchmark = example1\nbeta1 = 0.04\n") + out), 2);
  EXPECT_EQ(cli("run --config " + (dir / "b.cfg").string() + " --override-admissibility" + out), 0);
  EXPECT_EQ(cli("run --config " + write("ok.cfg", "benchmark = example1\n[mesh]\ncells = 5\n") + " --rk 1 --no-limiter" + out),
            0);
  EXPECT_EQ(cli("run --config " + (dir / "ok.cfg").string() + " --cfl sometimes" + out), 2);
  EXPECT_EQ(cli("convergence --config " + (dir / "ok.cfg").string() + out), 2);
  EXPECT_EQ(cli("run --config " +
                write("cfl.cfg", "benchmark = example2\n[mesh]\ncells = 5\n[time]\nmu = 1\nfinal_time = 0.1\n") +
                " --cfl strict" + out),
            3);
  EXPECT_TRUE(fs::exists(dir / "out" / "diagnostics.csv"));
}
