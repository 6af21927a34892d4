#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <type_traits>

#include "ddgpnp/flux.hpp"
#include "ddgpnp/poisson.hpp"
#include "ddgpnp/weight.hpp"

namespace ddgpnp {

/// Time derivative of the density coefficients for d_t c = div(M grad g) + f
/// with zero-flux boundaries: per cell, the mass-matrix inverse applied to
///   -int_K M grad g . grad v + sum_faces {M} (Fl_n(g) v + (g - {g}) d_n v) + int_K f v.
/// `out` must live on the same space as g; it is overwritten.
template <int Dim>
void np_rhs(const Field<Dim>& g, const WeightField<Dim>& M, const FluxParams& p, Field<Dim>& out,
            const std::type_identity_t<SpaceTimeFunction<Dim>>* source = nullptr, double t = 0.0) {
  constexpr int nb = Basis<Dim>::size;
  const auto& sp = g.space();
  const auto& mesh = sp.mesh();
  const auto& nodes = sp.volume_nodes();
  const double jac = sp.volume_jacobian();
  std::fill(out.coefficients().begin(), out.coefficients().end(), 0.0);

  std::array<double, Dim> s2{};
  for (int d = 0; d < Dim; ++d) s2[d] = sp.derivative_scale(d) * sp.derivative_scale(d);

  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    const double* gc = g.cell(c);
    double* r = out.cell(c);
    const auto mv = M.cell_values(c);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const auto& node = nodes[q];
      const double wm = jac * node.weight * mv[q];
      for (int d = 0; d < Dim; ++d) {
        const double dg = wm * s2[d] * detail::dot<Dim>(node.dphi[d], gc);
        for (int a = 1; a < nb; ++a) r[a] -= dg * node.dphi[d][a];
      }
      if (source) {
        const double fv = jac * node.weight * (*source)(t, mesh.to_physical(c, node.ref));
        for (int a = 0; a < nb; ++a) r[a] += fv * node.phi[a];
      }
    }
  }

  const auto& faces = mesh.faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& face = faces[f];
    if (!face.interior()) continue;
    const int d = face.direction;
    const double h = mesh.size(d);
    const double s1 = sp.derivative_scale(d);
    const double fj = sp.face_jacobian(d);
    const auto& up = sp.face_nodes(d, true);   // minus cell, upper face
    const auto& lo = sp.face_nodes(d, false);  // plus cell, lower face
    const double* gm = g.cell(*face.minus);
    const double* gp = g.cell(*face.plus);
    double* rm = out.cell(*face.minus);
    double* rp = out.cell(*face.plus);
    for (std::size_t k = 0; k < up.size(); ++k) {
      const auto& nm = up[k];
      const auto& np = lo[k];
      const double vm = detail::dot<Dim>(nm.phi, gm);
      const double vp = detail::dot<Dim>(np.phi, gp);
      const double dm = s1 * detail::dot<Dim>(nm.dn, gm);
      const double dp = s1 * detail::dot<Dim>(np.dn, gp);
      const double ddm = s1 * s1 * detail::dot<Dim>(nm.dnn, gm);
      const double ddp = s1 * s1 * detail::dot<Dim>(np.dnn, gp);
      const double flux = p.beta0 * (vp - vm) / h + 0.5 * (dm + dp) + p.beta1 * h * (ddp - ddm);
      const double avg = 0.5 * (vm + vp);
      const double wm = fj * nm.weight * M.face_average(f, k);
      const double jm = wm * (vm - avg) * s1;
      const double jp = wm * (vp - avg) * s1;
      const double fw = wm * flux;
      for (int a = 0; a < nb; ++a) {
        rm[a] += fw * nm.phi[a] + jm * nm.dn[a];
        rp[a] -= fw * np.phi[a] + jp * np.dn[a];
      }
    }
  }

  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    double* r = out.cell(c);
    for (int a = 0; a < nb; ++a) r[a] /= jac * basis_norm_squared<Dim>(a);
  }
}

template <int Dim>
Field<Dim> np_rhs(const Field<Dim>& g, const WeightField<Dim>& M, const FluxParams& p,
                  const std::type_identity_t<SpaceTimeFunction<Dim>>* source = nullptr, double t = 0.0) {
  Field<Dim> out(g.space_ptr(), FieldRole::density);
  np_rhs(g, M, p, out, source, t);
  return out;
}

}  // namespace ddgpnp
