#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "ddgpnp/problem.hpp"

namespace ddgpnp::bench {

using std::numbers::pi;

/// Modified PNP on [0, 1] with exact solution
///   c1 = x^2 (1-x)^2 e^-t,  c2 = x^2 (1-x)^3 e^-t,  psi = -(10x^7 - 28x^6 + 21x^5) e^-t / 420,
/// psi(0) = 0 and psi_x(1) = -e^-t / 60.
inline ProblemSpec<1> example1(int cells, FluxParams np = {4.0, 1.0 / 6.0}, FluxParams poisson = {4.0, 1.0 / 6.0}) {
  ProblemSpec<1> p("example1", build_mesh_1d(0.0, 1.0, cells));
  p.np_flux = np;
  p.poisson_flux = poisson;

  SpeciesSpec<1> s1;
  s1.name = "c1";
  s1.charge = 1.0;
  s1.exact = [](double t, const Point<1>& p) {
    const double x = p[0];
    return x * x * (1 - x) * (1 - x) * std::exp(-t);
  };
  s1.initial = [e = s1.exact](const Point<1>& x) { return e(0.0, x); };
  s1.source_terms = {
      {[](double t) { return std::exp(-2 * t); },
       [](const Point<1>& p) {
         const double x = p[0];
         return std::pow(x, 5) * ((((50 * x - 198) * x + 292) * x - 189) * x + 45) / 30.0;
       }},
      {[](double t) { return std::exp(-t); },
       [](const Point<1>& p) {
         const double x = p[0];
         return (((-x + 2) * x - 13) * x + 12) * x - 2;
       }},
  };

  SpeciesSpec<1> s2;
  s2.name = "c2";
  s2.charge = -1.0;
  s2.exact = [](double t, const Point<1>& p) {
    const double x = p[0];
    return x * x * std::pow(1 - x, 3) * std::exp(-t);
  };
  s2.initial = [e = s2.exact](const Point<1>& x) { return e(0.0, x); };
  s2.source_terms = {
      {[](double t) { return std::exp(-2 * t); },
       [](const Point<1>& p) {
         const double x = p[0];
         return (x - 1) * std::pow(x, 5) * ((((110 * x - 430) * x + 623) * x - 393) * x + 90) / 60.0;
       }},
      {[](double t) { return std::exp(-t); },
       [](const Point<1>& p) {
         const double x = p[0];
         return (x - 1) * ((((x - 2) * x + 21) * x - 16) * x + 2);
       }},
  };
  p.species = {s1, s2};

  p.exact_potential = [](double t, const Point<1>& p) {
    const double x = p[0];
    return -std::pow(x, 5) * ((10 * x - 28) * x + 21) * std::exp(-t) / 420.0;
  };
  p.bc.kind = {BoundaryKind::dirichlet, BoundaryKind::neumann};
  p.bc.dirichlet = [](double, const Point<1>&) { return 0.0; };
  p.bc.neumann = [](double t, const Point<1>&) { return -std::exp(-t) / 60.0; };
  return p;
}

/// PNP on [0, 1] relaxing to c1 = c2 = 3, psi = 0, with zero-flux data for
/// the densities and homogeneous Neumann data for psi.
inline ProblemSpec<1> example2(int cells, FluxParams np = {4.0, 1.0 / 6.0}, FluxParams poisson = {4.0, 1.0 / 6.0}) {
  ProblemSpec<1> p("example2", build_mesh_1d(0.0, 1.0, cells));
  p.np_flux = np;
  p.poisson_flux = poisson;
  SpeciesSpec<1> s1;
  s1.name = "c1";
  s1.charge = 1.0;
  s1.initial = [](const Point<1>& x) { return 1.0 + pi * std::sin(pi * x[0]); };
  s1.steady_amplitude = 3.0;
  SpeciesSpec<1> s2;
  s2.name = "c2";
  s2.charge = -1.0;
  s2.initial = [](const Point<1>& x) { return 4.0 - 2.0 * x[0]; };
  s2.steady_amplitude = 3.0;
  p.species = {s1, s2};
  p.bc = PoissonBC<1>::all(BoundaryKind::neumann);
  p.bc.neumann = [](double, const Point<1>&) { return 0.0; };
  p.gauge = true;
  return p;
}

/// Amplitudes of the manufactured Example 3 solution
///   c1 = a1 (e^{-a t} cos x cos y + 1), c2 = a2 (...), psi = a3 e^{-a t} cos x cos y.
struct Example3Params {
  double alpha = 1e-3;
  double alpha1 = 1e-3;
  double alpha2 = 1e-3;
  double alpha3 = 1e-3;
  /// true: Dirichlet on all of the boundary; false: Dirichlet on x = 0, pi only.
  bool all_dirichlet = true;
};

/// Parameters of test cases 3-1 .. 3-4 (variant 1..3 selects the 3-4 table).
inline Example3Params example3_params(int test_case, int variant = 1) {
  switch (test_case) {
    case 1: return {1e-3, 1e-3, 1e-3, 1e-3, true};
    case 2: return {1e-3, 1e-3, 1e-3, 1e-3, false};
    case 3: return {2e-2, 2e-2, 1e-2, 2e-2, false};
    case 4:
      switch (variant) {
        case 1: return {1.0, 1.0, 0.5, 1.0, true};
        case 2: return {1.0, 1.0, 1.0, 1.0, true};
        case 3: return {1.0, 2.0, 2.0, 2.0, true};
        default: break;
      }
      break;
    default: break;
  }
  throw std::invalid_argument("example3: unknown test case " + std::to_string(test_case) + " variant " +
                              std::to_string(variant));
}

/// Manufactured sources for Example 3 with E = e^{-a t}, C = cos x cos y,
/// G = |grad C|^2:
///   f1 = E a1 C (2 - a + 2 a3) + E^2 a1 a3 (2 C^2 - G)
///   f2 = E a2 C (2 - a - 2 a3) + E^2 a2 a3 (G - 2 C^2)
///   f3 = E (2 a3 - a1 + a2) C - (a1 - a2)
inline ProblemSpec<2> example3(const Example3Params& ap, int cells, FluxParams np = {16.0, 1.0 / 6.0},
                               FluxParams poisson = {16.0, 1.0 / 6.0}) {
  ProblemSpec<2> p("example3", build_mesh_2d(pi, pi, cells, cells));
  p.np_flux = np;
  p.poisson_flux = poisson;
  const auto C = [](const Point<2>& x) { return std::cos(x[0]) * std::cos(x[1]); };
  const auto G = [](const Point<2>& x) {
    const double a = std::sin(x[0]) * std::cos(x[1]);
    const double b = std::cos(x[0]) * std::sin(x[1]);
    return a * a + b * b;
  };
  const double a = ap.alpha;
  const auto E = [a](double t) { return std::exp(-a * t); };
  const auto E2 = [a](double t) { return std::exp(-2.0 * a * t); };
  const auto Q = [=](const Point<2>& x) { return 2.0 * C(x) * C(x) - G(x); };
  SpeciesSpec<2> s1;
  s1.name = "c1";
  s1.charge = 1.0;
  s1.exact = [=](double t, const Point<2>& x) { return ap.alpha1 * (E(t) * C(x) + 1.0); };
  s1.initial = [e = s1.exact](const Point<2>& x) { return e(0.0, x); };
  s1.source_terms = {
      {E, [=](const Point<2>& x) { return ap.alpha1 * (2.0 - a + 2.0 * ap.alpha3) * C(x); }},
      {E2, [=](const Point<2>& x) { return ap.alpha1 * ap.alpha3 * Q(x); }},
  };
  SpeciesSpec<2> s2;
  s2.name = "c2";
  s2.charge = -1.0;
  s2.exact = [=](double t, const Point<2>& x) { return ap.alpha2 * (E(t) * C(x) + 1.0); };
  s2.initial = [e = s2.exact](const Point<2>& x) { return e(0.0, x); };
  s2.source_terms = {
      {E, [=](const Point<2>& x) { return ap.alpha2 * (2.0 - a - 2.0 * ap.alpha3) * C(x); }},
      {E2, [=](const Point<2>& x) { return -ap.alpha2 * ap.alpha3 * Q(x); }},
  };
  p.species = {s1, s2};
  p.exact_potential = [=](double t, const Point<2>& x) { return ap.alpha3 * E(t) * C(x); };
  p.poisson_source_terms = {
      {E, [=](const Point<2>& x) { return (2.0 * ap.alpha3 - ap.alpha1 + ap.alpha2) * C(x); }},
      {[](double) { return 1.0; }, [=](const Point<2>&) { return ap.alpha2 - ap.alpha1; }},
  };
  if (ap.all_dirichlet) {
    p.bc = PoissonBC<2>::all(BoundaryKind::dirichlet);
  } else {
    p.bc.kind = {BoundaryKind::dirichlet, BoundaryKind::dirichlet, BoundaryKind::neumann, BoundaryKind::neumann};
  }
  p.bc.dirichlet = p.exact_potential;
  // Outward normal derivative on y = 0 (normal -y) and y = pi (normal +y).
  p.bc.neumann = [=](double t, const Point<2>& x) {
    const double dy = -ap.alpha3 * std::exp(-a * t) * std::cos(x[0]) * std::sin(x[1]);
    return x[1] < 0.5 * pi ? -dy : dy;
  };
  return p;
}

/// Positivity test on [0, 1]^2: psi = 0 on x = 0, 1 and zero Neumann data on y = 0, 1.
inline ProblemSpec<2> example4(int cells, FluxParams np = {16.0, 1.0 / 6.0}, FluxParams poisson = {16.0, 1.0 / 6.0}) {
  ProblemSpec<2> p("example4", build_mesh_2d(1.0, 1.0, cells, cells));
  p.np_flux = np;
  p.poisson_flux = poisson;
  SpeciesSpec<2> s1;
  s1.name = "c1";
  s1.charge = 1.0;
  s1.initial = [](const Point<2>& x) { return (pi * std::sin(pi * x[0]) + pi * std::sin(pi * x[1])) / 20.0; };
  SpeciesSpec<2> s2;
  s2.name = "c2";
  s2.charge = -1.0;
  s2.initial = [](const Point<2>& x) {
    const double a = x[0] * (1 - x[0]);
    const double b = x[1] * (1 - x[1]);
    return a * a + b * b;
  };
  p.species = {s1, s2};
  p.bc.kind = {BoundaryKind::dirichlet, BoundaryKind::dirichlet, BoundaryKind::neumann, BoundaryKind::neumann};
  p.bc.dirichlet = [](double, const Point<2>&) { return 0.0; };
  p.bc.neumann = [](double, const Point<2>&) { return 0.0; };
  return p;
}

/// Electroneutral constant state: two opposite unit charges at density
/// `value`, no fixed charge, psi = 0 on the boundary. Every step is a fixed point.
template <int Dim>
ProblemSpec<Dim> neutral_state(Mesh<Dim> mesh, double value = 1.0, FluxParams np = {4.0, 1.0 / 6.0}) {
  ProblemSpec<Dim> p("neutral", std::move(mesh));
  p.np_flux = np;
  p.poisson_flux = np;
  for (double q : {1.0, -1.0}) {
    SpeciesSpec<Dim> s;
    s.name = q > 0 ? "c1" : "c2";
    s.charge = q;
    s.initial = [value](const Point<Dim>&) { return value; };
    s.exact = [value](double, const Point<Dim>&) { return value; };
    s.steady_amplitude = value;
    p.species.push_back(s);
  }
  p.exact_potential = [](double, const Point<Dim>&) { return 0.0; };
  p.bc = PoissonBC<Dim>::all(BoundaryKind::dirichlet);
  p.bc.dirichlet = [](double, const Point<Dim>&) { return 0.0; };
  return p;
}

}  // namespace ddgpnp::bench
