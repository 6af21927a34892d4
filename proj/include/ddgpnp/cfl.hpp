#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "ddgpnp/flux.hpp"
#include "ddgpnp/test_set.hpp"

namespace ddgpnp {

/// alpha_1(gamma) = (8 beta1 - 1 + gamma) / (2 (1 + gamma)).
inline double alpha1(double gamma, const FluxParams& p) {
  return (8.0 * p.beta1 - 1.0 + gamma) / (2.0 * (1.0 + gamma));
}

/// alpha_3(gamma) = beta0 + (8 beta1 - 3 + gamma) / (2 (1 - gamma)).
inline double alpha3(double gamma, const FluxParams& p) {
  return p.beta0 + (8.0 * p.beta1 - 3.0 + gamma) / (2.0 * (1.0 - gamma));
}

/// Forward Euler cell average along one line, written in the values of g at
/// the test points {-1, gamma, 1} of the cell and of its two neighbours:
///   H = sum_i (w_i - mu s_i) g(x_i) + mu sum_i (l_i g_lower(x_i) + u_i g_upper(x_i)).
/// Neighbour coefficients are zero on boundary faces (zero flux).
struct LineUpdate {
  std::array<double, 3> omega{};
  std::array<double, 3> self{};
  std::array<double, 3> lower{};
  std::array<double, 3> upper{};
};

/// {M} on the face on one side of cell c at transverse node r, or 0 on the boundary.
template <int Dim>
double face_weight(const WeightField<Dim>& M, std::size_t c, int d, std::size_t r, bool upper_side) {
  const auto& mesh = M.space().mesh();
  const std::size_t f = mesh.face_of(c, d, upper_side);
  if (!mesh.faces()[f].interior()) return 0.0;
  return M.face_average(f, r);
}

template <int Dim>
LineUpdate line_update(const WeightField<Dim>& M, const TestSet<Dim>& ts, const FluxParams& p, std::size_t c,
                       int d, std::size_t r) {
  const auto& mesh = M.space().mesh();
  const LineTest& lt = ts.line(c, d, r);
  const double g = lt.gamma;
  const double ml = face_weight(M, c, d, r, false);
  const double mr = face_weight(M, c, d, r, true);
  const double mid = 2.0 * (1.0 - 4.0 * p.beta1);
  LineUpdate u;
  u.omega = {lt.weights.w1, lt.weights.w2, lt.weights.w3};
  u.self = {alpha3(-g, p) * ml + alpha1(g, p) * mr, mid * (ml + mr) / (1.0 - g * g),
            alpha3(g, p) * mr + alpha1(-g, p) * ml};
  if (const auto lo = mesh.neighbor(c, d, false)) {
    const double gl = ts.line(*lo, d, r).gamma;
    u.lower = {ml * alpha1(gl, p), ml * mid / (1.0 - gl * gl), ml * alpha3(gl, p)};
  }
  if (const auto hi = mesh.neighbor(c, d, true)) {
    const double gu = ts.line(*hi, d, r).gamma;
    u.upper = {mr * alpha3(-gu, p), mr * mid / (1.0 - gu * gu), mr * alpha1(-gu, p)};
  }
  return u;
}

/// mu = sum_d dt / h_d^2.
template <int Dim>
double mesh_ratio(const Mesh<Dim>& mesh, double dt) {
  double mu = 0.0;
  for (int d = 0; d < Dim; ++d) mu += dt / (mesh.size(d) * mesh.size(d));
  return mu;
}

struct CflReport {
  double mu0 = std::numeric_limits<double>::infinity();
  std::array<double, 2> mu0_axis{std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity()};
  /// False when some neighbour coefficient is negative (flux parameters
  /// outside the positivity range); mu0 then only bounds the self terms.
  bool applicable = true;
  std::size_t worst_cell = 0;

  /// Largest dt with mesh_ratio(mesh, dt) <= mu0.
  template <int Dim>
  double max_dt(const Mesh<Dim>& mesh) const {
    return mu0 / mesh_ratio(mesh, 1.0);
  }
};

/// Largest mesh ratio for which every coefficient of the line decomposition
/// of every cell stays nonnegative.
template <int Dim>
CflReport cfl_mu0(const WeightField<Dim>& M, const TestSet<Dim>& ts, const FluxParams& p) {
  CflReport rep;
  const auto& sp = M.space();
  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    for (int d = 0; d < Dim; ++d) {
      for (std::size_t r = 0; r < ts.lines_per_axis(); ++r) {
        const LineUpdate u = line_update(M, ts, p, c, d, r);
        for (int i = 0; i < 3; ++i) {
          if (u.lower[i] < 0.0 || u.upper[i] < 0.0 || u.self[i] < 0.0) rep.applicable = false;
          if (u.self[i] > 0.0) {
            const double bound = u.omega[i] / u.self[i];
            if (bound < rep.mu0_axis[d]) rep.mu0_axis[d] = bound;
            if (bound < rep.mu0) {
              rep.mu0 = bound;
              rep.worst_cell = c;
            }
          }
        }
      }
    }
  }
  if (!transport_params_admissible(p)) rep.applicable = false;
  return rep;
}

/// Forward Euler cell average of cell c from the line decompositions.
/// Equals the v = 1 component of the weak form (no source term).
template <int Dim>
double decomposed_average_update(const Field<Dim>& g, const WeightField<Dim>& M, const TestSet<Dim>& ts,
                                 const FluxParams& p, double dt, std::size_t c) {
  const auto& sp = g.space();
  const auto& mesh = sp.mesh();
  const double mu = mesh_ratio(mesh, dt);
  if (mu == 0.0) return weighted_cell_average(g, M, c);
  auto values = [&](std::size_t cell, int d, std::size_t r) {
    std::array<double, 3> v{};
    const auto pts = ts.line_points(cell, d, r);
    for (int i = 0; i < 3; ++i) v[i] = detail::dot<Dim>(basis_values<Dim>(pts[i]), g.cell(cell));
    return v;
  };
  double total = 0.0;
  for (int d = 0; d < Dim; ++d) {
    const double share = dt / (mesh.size(d) * mesh.size(d)) / mu;
    double line_sum = 0.0;
    for (std::size_t r = 0; r < ts.lines_per_axis(); ++r) {
      const LineUpdate u = line_update(M, ts, p, c, d, r);
      const auto vs = values(c, d, r);
      double h = 0.0;
      for (int i = 0; i < 3; ++i) h += (u.omega[i] - mu * u.self[i]) * vs[i];
      if (const auto lo = mesh.neighbor(c, d, false)) {
        const auto vl = values(*lo, d, r);
        for (int i = 0; i < 3; ++i) h += mu * u.lower[i] * vl[i];
      }
      if (const auto hi = mesh.neighbor(c, d, true)) {
        const auto vu = values(*hi, d, r);
        for (int i = 0; i < 3; ++i) h += mu * u.upper[i] * vu[i];
      }
      const double wr = Dim == 1 ? 1.0 : 0.5 * sp.rule().weights[r];
      line_sum += wr * h;
    }
    total += share * line_sum;
  }
  return total;
}

}  // namespace ddgpnp
