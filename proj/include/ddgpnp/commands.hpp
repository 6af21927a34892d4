#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ddgpnp/benchmarks.hpp"
#include "ddgpnp/config.hpp"
#include "ddgpnp/csv.hpp"
#include "ddgpnp/driver.hpp"

namespace ddgpnp {

/// Problem of the configured benchmark on a mesh with `cells` cells per direction.
inline ProblemSpec<1> make_problem_1d(const RunConfig& c, int cells) {
  if (c.benchmark == "example1") return bench::example1(cells, c.np_flux, c.poisson_flux);
  if (c.benchmark == "example2") return bench::example2(cells, c.np_flux, c.poisson_flux);
  if (c.benchmark == "custom" && c.dim == 1) {
    auto p = bench::neutral_state<1>(build_mesh_1d(0.0, 1.0, cells), c.value, c.np_flux);
    p.poisson_flux = c.poisson_flux;
    return p;
  }
  throw ConfigError("benchmark " + c.benchmark + " is not one-dimensional");
}

inline ProblemSpec<2> make_problem_2d(const RunConfig& c, int cells) {
  if (c.is_example3()) {
    return bench::example3(bench::example3_params(c.example3_case(), c.variant), cells, c.np_flux, c.poisson_flux);
  }
  if (c.benchmark == "example4") return bench::example4(cells, c.np_flux, c.poisson_flux);
  if (c.benchmark == "custom" && c.dim == 2) {
    auto p = bench::neutral_state<2>(build_mesh_2d(1.0, 1.0, cells, cells), c.value, c.np_flux);
    p.poisson_flux = c.poisson_flux;
    return p;
  }
  throw ConfigError("benchmark " + c.benchmark + " is not two-dimensional");
}

template <int Dim>
ProblemSpec<Dim> make_problem(const RunConfig& c, int cells) {
  if constexpr (Dim == 1) {
    return make_problem_1d(c, cells);
  } else {
    return make_problem_2d(c, cells);
  }
}

/// Calls fn(ProblemSpec<Dim>) with the problem of the configured dimension.
template <class Fn>
decltype(auto) with_problem(const RunConfig& c, int cells, Fn&& fn) {
  if (c.dimension() == 1) return fn(make_problem<1>(c, cells));
  return fn(make_problem<2>(c, cells));
}

/// Warning printed when positivity parameters are overridden.
inline std::optional<std::string> admissibility_banner(const RunConfig& c) {
  if (transport_params_admissible(c.np_flux)) return std::nullopt;
  return "*** WARNING: np_flux (beta0 = " + csv::number(c.np_flux.beta0) + ", beta1 = " +
         csv::number(c.np_flux.beta1) +
         ") is outside beta1 in [1/8, 1/4], beta0 >= 1: positivity of cell averages is not guaranteed ***";
}

template <int Dim>
std::vector<std::string> species_names(const ProblemSpec<Dim>& p) {
  std::vector<std::string> out;
  for (const auto& s : p.species) out.push_back(s.name);
  return out;
}

struct RunSummary {
  std::vector<DiagnosticsRecord> diagnostics;
  std::optional<ErrorReport> errors;
  std::size_t cfl_warnings = 0;
};

/// Single run on the first configured mesh: diagnostics.csv and final snapshots.
inline RunSummary cmd_run(const RunConfig& c, std::ostream& log) {
  std::filesystem::create_directories(c.output);
  return with_problem(c, c.cells.front(), [&]<int Dim>(ProblemSpec<Dim> p) {
    const auto names = species_names(p);
    PnpSolver<Dim> solver(std::move(p), sim_config(c));
    auto r = solver.run();
    const std::filesystem::path dir(c.output);
    csv::write_file((dir / "diagnostics.csv").string(), csv::diagnostics(r.diagnostics, names));
    const auto& s = r.final_state;
    for (std::size_t i = 0; i < names.size(); ++i) {
      csv::write_file((dir / ("snapshot_" + names[i] + ".csv")).string(), csv::snapshot(s.densities[i]));
    }
    csv::write_file((dir / "snapshot_psi.csv").string(), csv::snapshot(solver.solve_potential(s.densities, s.t)));
    log << "run " << c.benchmark << ": " << s.step << " steps to t = " << csv::number(s.t) << ", "
        << r.diagnostics.size() << " diagnostics rows\n";
    if (r.cfl_warnings) log << "cfl: " << r.cfl_warnings << " steps exceeded mu0\n";
    if (r.errors) {
      for (std::size_t i = 0; i < names.size(); ++i) {
        log << "l1 error " << names[i] << " = " << csv::number(r.errors->density[i]) << "\n";
      }
      log << "l1 error psi = " << csv::number(r.errors->potential) << "\n";
    }
    return RunSummary{std::move(r.diagnostics), std::move(r.errors), r.cfl_warnings};
  });
}

/// Errors against the exact solution, or against a finer self-reference
/// stored and reloaded as snapshots when no exact solution exists.
inline std::vector<csv::ErrorRow> cmd_convergence(const RunConfig& c, std::ostream& log) {
  if (c.cells.size() < 2) throw ConfigError("convergence needs at least two meshes to compute an order");
  std::filesystem::create_directories(c.output);
  const std::filesystem::path dir(c.output);
  const bool two_d = c.dimension() == 2;
  std::vector<csv::ErrorRow> rows;
  std::vector<std::string> names;
  return with_problem(c, c.cells.front(), [&]<int Dim>(ProblemSpec<Dim> probe) {
    names = species_names(probe);
    const bool exact = probe.has_exact();
    std::optional<std::vector<Field<Dim>>> ref;
    std::optional<Field<Dim>> ref_psi;
    if (!exact) {
      int finest = 0;
      for (int n : c.cells) finest = std::max(finest, n);
      const int nref = finest * c.reference_refinement;
      for (int n : c.cells) {
        if (nref % n != 0) throw ConfigError("reference mesh must refine every mesh of the study");
      }
      PnpSolver<Dim> solver(make_problem<Dim>(c, nref), sim_config(c));
      const auto r = solver.run();
      const auto& s = r.final_state;
      std::vector<Field<Dim>> loaded;
      for (std::size_t i = 0; i < names.size(); ++i) {
        const auto path = (dir / ("reference_" + names[i] + ".csv")).string();
        csv::write_file(path, csv::snapshot(s.densities[i]));
        loaded.push_back(csv::read_snapshot<Dim>(csv::read_file(path), solver.space_ptr()));
      }
      const auto path = (dir / "reference_psi.csv").string();
      csv::write_file(path, csv::snapshot(solver.solve_potential(s.densities, s.t)));
      ref_psi = csv::read_snapshot<Dim>(csv::read_file(path), solver.space_ptr(), FieldRole::potential);
      ref = std::move(loaded);
      log << "reference: " << nref << " cells per direction\n";
    }
    for (int n : c.cells) {
      ProblemSpec<Dim> p = make_problem<Dim>(c, n);
      const double h = p.mesh.size(0);
      PnpSolver<Dim> solver(std::move(p), sim_config(c));
      const auto r = solver.run();
      csv::ErrorRow row{two_d ? static_cast<double>(n) : h, h, {}};
      if (exact) {
        row.errors = r.errors->density;
        row.errors.push_back(r.errors->potential);
      } else {
        const auto& s = r.final_state;
        for (std::size_t i = 0; i < names.size(); ++i) row.errors.push_back(l1_difference((*ref)[i], s.densities[i]));
        row.errors.push_back(l1_difference(*ref_psi, solver.solve_potential(s.densities, s.t)));
      }
      log << (two_d ? "N = " : "h = ") << csv::number(row.label);
      for (std::size_t j = 0; j < row.errors.size(); ++j) {
        log << "  " << (j < names.size() ? names[j] : std::string("psi")) << " " << csv::number(row.errors[j]);
      }
      log << "\n";
      rows.push_back(std::move(row));
    }
    csv::write_file((dir / "errors.csv").string(), csv::errors(two_d ? "N" : "h", names, rows));
    return rows;
  });
}

struct SteadyReport {
  std::vector<double> changes;  // max coefficient change of each step
  double max_change = 0.0;
  bool monotone = true;  // changes nonincreasing
};

/// Steps from a steady construction and records the per-step change.
inline SteadyReport cmd_steady_check(const RunConfig& c, std::ostream& log) {
  std::filesystem::create_directories(c.output);
  return with_problem(c, c.cells.front(), [&]<int Dim>(ProblemSpec<Dim> p) {
    State<Dim> s;
    SimConfig sc = sim_config(c);
    switch (c.steady_mode) {
      case SteadyMode::neutral:
      case SteadyMode::perturbed: {
        if (c.benchmark != "custom") throw ConfigError("steady.mode " + std::string(to_string(c.steady_mode)) +
                                                       " needs the custom benchmark");
        if (c.steady_mode == SteadyMode::perturbed) {
          const double v = c.value, eps = c.perturbation;
          // Same perturbation for every species: the charge density stays zero.
          for (auto& sp : p.species) {
            sp.initial = [v, eps](const Point<Dim>& x) {
              double m = 1.0;
              for (int d = 0; d < Dim; ++d) m *= std::cos(std::numbers::pi * x[d]);
              return v * (1.0 + eps * m);
            };
          }
        }
        if (c.steady_mode == SteadyMode::neutral) {
          s = PnpSolver<Dim>(p, sc).init();
        } else {
          SimConfig settle = sc;
          settle.final_time = c.settle_time;
          settle.cadence = static_cast<std::size_t>(-1);
          s = PnpSolver<Dim>(p, settle).run().final_state;
          log << "relaxed to t = " << csv::number(s.t) << " in " << s.step << " steps\n";
        }
        break;
      }
      case SteadyMode::resume:
      case SteadyMode::reinit: {
        SimConfig settle = sc;
        settle.final_time = c.settle_time;
        settle.cadence = static_cast<std::size_t>(-1);
        PnpSolver<Dim> pre(p, settle);
        s = pre.run().final_state;
        if (c.steady_mode == SteadyMode::reinit) {
          const Field<Dim> phi = pre.solve_potential(s.densities, s.t);
          s.densities = steady_state_init(p, fit_steady_amplitudes(p, s.densities, phi), phi);
        }
        log << "settled to t = " << csv::number(s.t) << " in " << s.step << " steps\n";
        break;
      }
    }
    PnpSolver<Dim> solver(std::move(p), sc);
    SteadyReport rep;
    std::string table = "step,t,max_change\n";
    const double dt = solver.dt();
    for (std::size_t n = 0; n < c.steady_steps; ++n) {
      const auto before = s.densities;
      solver.step(s, dt);
      const double d = max_coefficient_change(before, s.densities);
      if (!rep.changes.empty() && d > rep.changes.back()) rep.monotone = false;
      rep.changes.push_back(d);
      rep.max_change = std::max(rep.max_change, d);
      table += std::to_string(n + 1) + "," + csv::number(s.t) + "," + csv::number(d) + "\n";
    }
    csv::write_file((std::filesystem::path(c.output) / "steady.csv").string(), table);
    log << "steady-check " << to_string(c.steady_mode) << ": " << c.steady_steps
        << " steps, max change = " << csv::number(rep.max_change) << ", last = " << csv::number(rep.changes.back())
        << (rep.monotone ? ", monotone" : ", not monotone") << "\n";
    return rep;
  });
}

}  // namespace ddgpnp
