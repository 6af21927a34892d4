#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ddgpnp/flux.hpp"
#include "ddgpnp/mesh.hpp"
#include "ddgpnp/poisson.hpp"

namespace ddgpnp {

template <int Dim>
using SpaceFunction = std::function<double(const Point<Dim>&)>;

/// One term a(t) s(x) of a source that separates in time and space. The
/// spatial factor is projected once per run.
template <int Dim>
struct SeparableTerm {
  std::function<double(double)> time;
  SpaceFunction<Dim> space;
};

template <int Dim>
double evaluate_terms(const std::vector<SeparableTerm<Dim>>& terms, double t, const std::type_identity_t<Point<Dim>>& x) {
  double v = 0.0;
  for (const auto& term : terms) v += term.time(t) * term.space(x);
  return v;
}

template <int Dim>
struct SpeciesSpec {
  std::string name;
  double charge = 0.0;
  SpaceFunction<Dim> initial;
  SpaceTimeFunction<Dim> source;  // empty: no source
  /// Added to `source`.
  std::vector<SeparableTerm<Dim>> source_terms;
  SpaceTimeFunction<Dim> exact;   // empty: no exact solution
  double steady_amplitude = std::numeric_limits<double>::quiet_NaN();
};

/// Everything that defines one PNP initial-boundary value problem.
template <int Dim>
struct ProblemSpec {
  ProblemSpec(std::string name_, Mesh<Dim> mesh_) : name(std::move(name_)), mesh(std::move(mesh_)) {}

  std::string name;
  Mesh<Dim> mesh;
  std::vector<SpeciesSpec<Dim>> species;
  SpaceTimeFunction<Dim> rho0;            // fixed charge, empty = 0
  SpaceTimeFunction<Dim> poisson_source;  // extra Poisson source, empty = 0
  std::vector<SeparableTerm<Dim>> poisson_source_terms;  // added to poisson_source
  SpaceTimeFunction<Dim> exact_potential; // empty: no exact potential
  PoissonBC<Dim> bc;
  FluxParams np_flux{4.0, 1.0 / 6.0};
  FluxParams poisson_flux{4.0, 1.0 / 6.0};
  PoissonForm poisson_form = PoissonForm::symmetric;
  /// Pin the potential's mean when no Dirichlet face exists.
  bool gauge = false;

  std::vector<double> charges() const {
    std::vector<double> q;
    for (const auto& s : species) q.push_back(s.charge);
    return q;
  }
  bool has_exact() const {
    if (!exact_potential) return false;
    for (const auto& s : species) {
      if (!s.exact) return false;
    }
    return true;
  }
  LoadSpec<Dim> load_spec() const { return {charges(), rho0, poisson_source}; }
  /// Full NP source of species i at (t, x).
  double species_source(std::size_t i, double t, const Point<Dim>& x) const {
    const auto& s = species.at(i);
    return (s.source ? s.source(t, x) : 0.0) + evaluate_terms(s.source_terms, t, x);
  }
  /// Full extra Poisson source at (t, x), without rho0.
  double total_poisson_source(double t, const Point<Dim>& x) const {
    return (poisson_source ? poisson_source(t, x) : 0.0) + evaluate_terms(poisson_source_terms, t, x);
  }
};

enum class CflMode { monitor, strict, adaptive };

inline const char* to_string(CflMode m) {
  switch (m) {
    case CflMode::monitor: return "monitor";
    case CflMode::strict: return "strict";
    case CflMode::adaptive: return "adaptive";
  }
  return "?";
}

struct SimConfig {
  /// Time step; when not positive, dt = mu * h_min^2.
  double dt = 0.0;
  double mu = 0.01;
  double final_time = 0.01;
  int rk_order = 2;
  bool limiter = true;
  CflMode cfl = CflMode::monitor;
  /// Record diagnostics every `cadence` steps (and always at the end).
  std::size_t cadence = 1;
  /// Allow NP flux parameters outside the positivity range.
  bool override_admissibility = false;
};

template <int Dim>
double time_step(const SimConfig& cfg, const Mesh<Dim>& mesh) {
  if (cfg.dt > 0.0) return cfg.dt;
  const double h = mesh.min_size();
  return cfg.mu * h * h;
}

}  // namespace ddgpnp
