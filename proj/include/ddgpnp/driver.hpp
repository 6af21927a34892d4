#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddgpnp/cfl.hpp"
#include "ddgpnp/diagnostics.hpp"
#include "ddgpnp/errors.hpp"
#include "ddgpnp/limiter.hpp"
#include "ddgpnp/poisson.hpp"
#include "ddgpnp/problem.hpp"
#include "ddgpnp/transport.hpp"

namespace ddgpnp {

template <int Dim>
struct State {
  double t = 0.0;
  std::size_t step = 0;
  std::vector<Field<Dim>> densities;
};

/// What one forward Euler stage saw: minima of g on the test sets and the
/// CFL bound of the stage.
struct StageInfo {
  std::vector<double> min_g_before;
  std::vector<double> min_g_after;
  std::size_t limited_cells = 0;
  double mu0 = std::numeric_limits<double>::infinity();
  bool cfl_applicable = true;

  void merge(const StageInfo& o) {
    if (min_g_before.empty()) {
      *this = o;
      return;
    }
    for (std::size_t i = 0; i < min_g_before.size(); ++i) {
      min_g_before[i] = std::min(min_g_before[i], o.min_g_before[i]);
      min_g_after[i] = std::min(min_g_after[i], o.min_g_after[i]);
    }
    limited_cells += o.limited_cells;
    mu0 = std::min(mu0, o.mu0);
    cfl_applicable = cfl_applicable && o.cfl_applicable;
  }
};

struct StepResult {
  double dt = 0.0;  // step actually taken
  StageInfo info;
  std::size_t halvings = 0;
  bool cfl_exceeded = false;
};

struct ErrorReport {
  std::vector<double> density;  // l1 error per species
  double potential = 0.0;
};

template <int Dim>
struct RunResult {
  State<Dim> final_state;
  std::vector<DiagnosticsRecord> diagnostics;
  std::optional<ErrorReport> errors;
  std::size_t cfl_warnings = 0;
};

/// Separable source term with its spatial factor already projected.
template <class T>
struct ProjectedTerm {
  std::function<double(double)> time;
  T value;
};

/// Thrown in adaptive CFL mode to restart a step with a smaller dt.
class CflViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Coupled Poisson / Nernst-Planck time stepper.
template <int Dim>
class PnpSolver {
 public:
  PnpSolver(ProblemSpec<Dim> problem, SimConfig config)
      : problem_(std::move(problem)), config_(config), space_(make_space(problem_.mesh)) {
    if (!(config_.final_time >= 0.0) || !std::isfinite(config_.final_time)) {
      throw ConfigError("final time must be a nonnegative number");
    }
    if (config_.rk_order != 1 && config_.rk_order != 2) {
      throw ConfigError("rk order must be 1 or 2, got " + std::to_string(config_.rk_order));
    }
    if (config_.cadence == 0) throw ConfigError("diagnostic cadence must be positive");
    if (!(time_step(config_, problem_.mesh) > 0.0)) throw ConfigError("time step must be positive");
    if (problem_.species.empty()) throw ConfigError("problem has no species");
    if (!transport_params_admissible(problem_.np_flux) && !config_.override_admissibility) {
      throw ConfigError("NP flux parameters (beta0 = " + std::to_string(problem_.np_flux.beta0) +
                        ", beta1 = " + std::to_string(problem_.np_flux.beta1) +
                        ") outside the admissible range beta0 >= 1, 1/8 <= beta1 <= 1/4");
    }
    poisson_ = assemble_operator<Dim>(space_, problem_.poisson_flux, problem_.bc, problem_.poisson_form,
                                      problem_.gauge);
    load_ = problem_.load_spec();
    for (const auto& term : problem_.poisson_source_terms) {
      const Field<Dim> proj = project_l2<Dim>(term.space, space_);
      Eigen::VectorXd v(static_cast<Eigen::Index>(space_->num_dofs()));
      constexpr int nb = Basis<Dim>::size;
      for (std::size_t k = 0; k < space_->num_cells(); ++k) {
        for (int a = 0; a < nb; ++a) {
          v[static_cast<Eigen::Index>(k * nb + a)] =
              space_->volume_jacobian() * basis_norm_squared<Dim>(a) * proj.cell(k)[a];
        }
      }
      poisson_terms_.push_back({term.time, std::move(v)});
    }
    for (const auto& sp : problem_.species) {
      std::vector<ProjectedTerm<Field<Dim>>> terms;
      for (const auto& term : sp.source_terms) terms.push_back({term.time, project_l2<Dim>(term.space, space_)});
      species_terms_.push_back(std::move(terms));
    }
    test_opts_.beta1 = problem_.np_flux.beta1;
    test_opts_.enforce_cap = 8.0 * problem_.np_flux.beta1 - 1.0 >= 0.0;
  }

  const ProblemSpec<Dim>& problem() const { return problem_; }
  const SimConfig& config() const { return config_; }
  const std::shared_ptr<const DgSpace<Dim>>& space_ptr() const { return space_; }
  const PoissonOperator<Dim>& poisson() const { return *poisson_; }
  double dt() const { return time_step(config_, problem_.mesh); }
  /// True when the positivity guarantees apply to the NP flux parameters.
  bool positivity_guaranteed() const { return transport_params_admissible(problem_.np_flux); }

  /// Densities at t = 0: L2 projections of the initial data.
  State<Dim> init() const {
    State<Dim> s;
    for (const auto& sp : problem_.species) {
      if (!sp.initial) throw ConfigError("species " + sp.name + " has no initial data");
      s.densities.push_back(project_l2<Dim>(sp.initial, space_));
    }
    return s;
  }

  Field<Dim> solve_potential(const std::vector<Field<Dim>>& c, double t) const {
    std::vector<const Field<Dim>*> ptrs;
    for (const auto& f : c) ptrs.push_back(&f);
    Eigen::VectorXd rhs = poisson_->assemble_load(ptrs, load_, t);
    for (const auto& term : poisson_terms_) rhs += term.time(t) * term.value;
    return poisson_->solve(rhs);
  }

  /// out_i = c_i + dt L_i(c, t). With dt = 0 only the diagnostics are computed.
  StageInfo euler_stage(const std::vector<Field<Dim>>& c, double t, double dt, std::vector<Field<Dim>>& out) const {
    const std::size_t ns = c.size();
    const Field<Dim> psi = solve_potential(c, t);
    const auto weights = build_weights(psi, problem_.charges());
    StageInfo info;
    info.min_g_before.assign(ns, 0.0);
    info.min_g_after.assign(ns, 0.0);
    const double mu = mesh_ratio(problem_.mesh, dt);
    out.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
      const auto& M = weights[i];
      Field<Dim> g = weighted_projection(c[i], M);
      const TestSet<Dim> ts = make_test_set(M, i);
      if (config_.limiter) {
        const LimiterReport rep = apply_scaling_limiter(g, M, ts);
        info.min_g_before[i] = rep.min_before;
        info.min_g_after[i] = rep.min_after;
        info.limited_cells += rep.limited;
      } else {
        info.min_g_before[i] = info.min_g_after[i] = ts.min_on_mesh(g);
      }
      const CflReport cfl = cfl_mu0(M, ts, problem_.np_flux);
      info.mu0 = std::min(info.mu0, cfl.mu0);
      info.cfl_applicable = info.cfl_applicable && cfl.applicable;
      if (dt > 0.0 && cfl.applicable && mu > cfl.mu0) {
        const std::string msg = "mesh ratio " + std::to_string(mu) + " exceeds the CFL bound " +
                                std::to_string(cfl.mu0) + " for species " + problem_.species[i].name + " at t = " +
                                std::to_string(t);
        if (config_.cfl == CflMode::strict) throw NumericalError(msg);
        if (config_.cfl == CflMode::adaptive) throw CflViolation(msg);
      }
      if (dt == 0.0) {
        out[i] = c[i];
        continue;
      }
      if (out[i].coefficients().size() != c[i].coefficients().size()) out[i] = Field<Dim>(space_, FieldRole::density);
      const auto& src = problem_.species[i].source;
      np_rhs(g, M, problem_.np_flux, out[i], src ? &src : nullptr, t);
      for (const auto& term : species_terms_[i]) out[i].axpby(1.0, term.time(t), term.value);
      out[i].axpby(dt, 1.0, c[i]);
    }
    return info;
  }

  /// Advance by dt (forward Euler or Heun's SSP-RK2). In adaptive CFL mode
  /// the step is retried with halved dt; the step taken is returned.
  StepResult step(State<Dim>& s, double dt) const {
    StepResult res;
    for (;;) {
      try {
        res.info = StageInfo{};
        res.cfl_exceeded = false;
        std::vector<Field<Dim>> u1;
        res.info.merge(checked_stage(s.densities, s.t, dt, u1, res));
        if (config_.rk_order == 2) {
          std::vector<Field<Dim>> u2;
          res.info.merge(checked_stage(u1, s.t + dt, dt, u2, res));
          for (std::size_t i = 0; i < u1.size(); ++i) {
            u2[i].axpby(0.5, 0.5, s.densities[i]);
          }
          s.densities = std::move(u2);
        } else {
          s.densities = std::move(u1);
        }
        break;
      } catch (const CflViolation&) {
        if (res.halvings >= 30) throw NumericalError("adaptive CFL: time step underflow");
        dt *= 0.5;
        ++res.halvings;
      }
    }
    s.t += dt;
    ++s.step;
    res.dt = dt;
    return res;
  }

  DiagnosticsRecord record(const State<Dim>& s, const StageInfo& info, double dt) const {
    DiagnosticsRecord r;
    r.t = s.t;
    r.step = s.step;
    const Field<Dim> psi = solve_potential(s.densities, s.t);
    const auto e = free_energy(s.densities, problem_.charges(), psi, problem_.rho0, s.t);
    r.energy = e.value;
    r.entropy_clipped = e.clipped;
    for (const auto& c : s.densities) {
      r.mass.push_back(total_mass(c));
      r.min_average.push_back(min_cell_average(c));
    }
    r.min_g_before = info.min_g_before;
    r.min_g_after = info.min_g_after;
    r.limited_cells = info.limited_cells;
    r.mu0 = info.cfl_applicable ? info.mu0 : std::numeric_limits<double>::quiet_NaN();
    r.mu = mesh_ratio(problem_.mesh, dt);
    return r;
  }

  /// l1 errors against the exact solution at the state's time.
  std::optional<ErrorReport> errors(const State<Dim>& s) const {
    if (!problem_.has_exact()) return std::nullopt;
    ErrorReport rep;
    for (std::size_t i = 0; i < s.densities.size(); ++i) {
      const auto& ex = problem_.species[i].exact;
      rep.density.push_back(l1_error(s.densities[i], [&](const Point<Dim>& x) { return ex(s.t, x); }));
    }
    const Field<Dim> psi = solve_potential(s.densities, s.t);
    rep.potential = l1_error(psi, [&](const Point<Dim>& x) { return problem_.exact_potential(s.t, x); });
    return rep;
  }

  /// March from `start` to the configured final time. `observer`, when
  /// given, sees every state after each step.
  RunResult<Dim> run(State<Dim> start, const std::function<void(const State<Dim>&, const StepResult&)>& observer = {}) const {
    RunResult<Dim> out;
    State<Dim>& s = out.final_state;
    s = std::move(start);
    const double T = config_.final_time;
    const double dt0 = dt();
    {
      std::vector<Field<Dim>> unused;
      out.diagnostics.push_back(record(s, euler_stage(s.densities, s.t, 0.0, unused), dt0));
    }
    StageInfo pending;
    double last_dt = dt0;
    std::size_t since = 0;
    while (T - s.t > 1e-9 * dt0) {
      const double h = std::min(dt0, T - s.t);
      const StepResult r = step(s, h);
      if (r.cfl_exceeded) ++out.cfl_warnings;
      pending.merge(r.info);
      last_dt = r.dt;
      if (observer) observer(s, r);
      const bool done = T - s.t <= 1e-9 * dt0;
      if (++since >= config_.cadence || done) {
        out.diagnostics.push_back(record(s, pending, last_dt));
        pending = StageInfo{};
        since = 0;
      }
    }
    out.errors = errors(s);
    return out;
  }

  RunResult<Dim> run() const { return run(init()); }

 private:
  TestSet<Dim> make_test_set(const WeightField<Dim>& M, std::size_t species) const {
    try {
      return TestSet<Dim>(M, test_opts_);
    } catch (const InadmissibleCell& e) {
      const auto ij = problem_.mesh.cell_coords(e.cell());
      std::string where = "(" + std::to_string(ij[0]);
      for (int d = 1; d < Dim; ++d) where += ", " + std::to_string(ij[d]);
      throw InadmissibleCell(std::string(e.what()) + " [species " + problem_.species[species].name + ", cell " +
                                 where + ")]",
                             e.cell());
    }
  }

  StageInfo checked_stage(const std::vector<Field<Dim>>& c, double t, double dt, std::vector<Field<Dim>>& out,
                          StepResult& res) const {
    StageInfo info = euler_stage(c, t, dt, out);
    if (info.cfl_applicable && mesh_ratio(problem_.mesh, dt) > info.mu0) res.cfl_exceeded = true;
    return info;
  }

  ProblemSpec<Dim> problem_;
  SimConfig config_;
  std::shared_ptr<const DgSpace<Dim>> space_;
  std::shared_ptr<const PoissonOperator<Dim>> poisson_;
  LoadSpec<Dim> load_;
  TestSetOptions test_opts_;
  std::vector<ProjectedTerm<Eigen::VectorXd>> poisson_terms_;
  std::vector<std::vector<ProjectedTerm<Field<Dim>>>> species_terms_;
};

/// Densities c_i = c_i^inf exp(-q_i phi), projected cell by cell.
template <int Dim>
std::vector<Field<Dim>> steady_state_init(const ProblemSpec<Dim>& problem, const std::vector<double>& amplitudes,
                                          const Field<Dim>& phi) {
  const auto& sp = phi.space();
  std::vector<Field<Dim>> out;
  for (std::size_t i = 0; i < problem.species.size(); ++i) {
    const double q = problem.species[i].charge;
    Field<Dim> c(phi.space_ptr(), FieldRole::density);
    for (std::size_t k = 0; k < sp.num_cells(); ++k) {
      double* cf = c.cell(k);
      for (std::size_t n = 0; n < sp.num_volume_nodes(); ++n) {
        const auto& node = sp.volume_node(n);
        const double v = amplitudes.at(i) * std::exp(-q * phi.node_value(k, n));
        for (int b = 0; b < Basis<Dim>::size; ++b) cf[b] += node.weight * v * node.phi[b];
      }
      for (int b = 0; b < Basis<Dim>::size; ++b) cf[b] /= basis_norm_squared<Dim>(b);
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// Amplitudes c_i^inf = mass_i / integral of exp(-q_i phi), matching the
/// masses of `c` with the Boltzmann profile of `phi`.
template <int Dim>
std::vector<double> fit_steady_amplitudes(const ProblemSpec<Dim>& problem, const std::vector<Field<Dim>>& c,
                                          const Field<Dim>& phi) {
  const auto& sp = phi.space();
  std::vector<double> amp;
  for (std::size_t i = 0; i < problem.species.size(); ++i) {
    const auto M = build_weight(phi, problem.species[i].charge);
    double z = 0.0;
    for (std::size_t k = 0; k < sp.num_cells(); ++k) {
      for (std::size_t n = 0; n < sp.num_volume_nodes(); ++n) z += sp.volume_node(n).weight * M.at(k, n);
    }
    amp.push_back(total_mass(c.at(i)) / (z * sp.volume_jacobian()));
  }
  return amp;
}

/// Largest coefficient change between two density sets.
template <int Dim>
double max_coefficient_change(const std::vector<Field<Dim>>& a, const std::vector<Field<Dim>>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].coefficients().size(); ++k) {
      m = std::max(m, std::abs(a[i].coefficients()[k] - b[i].coefficients()[k]));
    }
  }
  return m;
}

}  // namespace ddgpnp
