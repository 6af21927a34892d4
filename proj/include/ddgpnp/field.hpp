#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ddgpnp/space.hpp"

namespace ddgpnp {

enum class FieldRole { density, auxiliary, potential };

namespace detail {

// Evaluate a user function at a point; 1D callers may pass f(double).
template <int Dim, class F>
double call_at(const F& f, const Point<Dim>& x) {
  if constexpr (Dim == 1 && std::is_invocable_r_v<double, const F&, double>) {
    return f(x[0]);
  } else {
    return f(x);
  }
}

template <int Dim>
double dot(const BasisValues<Dim>& phi, const double* coeffs) {
  double s = 0.0;
  for (int b = 0; b < Basis<Dim>::size; ++b) s += phi[b] * coeffs[b];
  return s;
}

}  // namespace detail

/// Piecewise P2 function: per-cell modal coefficients on a shared DgSpace.
template <int Dim>
class Field {
 public:
  static constexpr int num_basis = Basis<Dim>::size;
  using Space = DgSpace<Dim>;

  Field() = default;
  explicit Field(std::shared_ptr<const Space> space, FieldRole role = FieldRole::density)
      : space_(std::move(space)), coeffs_(space_->num_dofs(), 0.0), role_(role) {}

  const Space& space() const { return *space_; }
  const std::shared_ptr<const Space>& space_ptr() const { return space_; }
  const Mesh<Dim>& mesh() const { return space_->mesh(); }
  FieldRole role() const { return role_; }
  void set_role(FieldRole r) { role_ = r; }
  std::size_t num_cells() const { return space_->num_cells(); }

  std::vector<double>& coefficients() { return coeffs_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double* cell(std::size_t c) { return coeffs_.data() + c * num_basis; }
  const double* cell(std::size_t c) const { return coeffs_.data() + c * num_basis; }
  std::span<const double, num_basis> cell_span(std::size_t c) const {
    return std::span<const double, num_basis>(cell(c), num_basis);
  }

  /// Value at volume quadrature node q of cell c.
  double node_value(std::size_t c, std::size_t q) const {
    return detail::dot<Dim>(space_->volume_node(q).phi, cell(c));
  }

  void check_cell(std::size_t c) const {
    if (c >= num_cells()) {
      throw std::out_of_range("cell index " + std::to_string(c) + " out of range (" +
                              std::to_string(num_cells()) + " cells)");
    }
  }

  Field& operator+=(const Field& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& v : coeffs_) v *= s;
    return *this;
  }
  /// this = a*this + b*o
  void axpby(double a, double b, const Field& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] = a * coeffs_[i] + b * o.coeffs_[i];
  }

 private:
  std::shared_ptr<const Space> space_;
  std::vector<double> coeffs_;
  FieldRole role_ = FieldRole::density;
};

/// Value of the modal expansion at reference point `ref` of cell c.
template <int Dim>
double eval(const Field<Dim>& u, std::size_t c, const std::type_identity_t<Point<Dim>>& ref) {
  u.check_cell(c);
  return detail::dot<Dim>(basis_values<Dim>(ref), u.cell(c));
}

/// Physical gradient at reference point `ref` of cell c.
template <int Dim>
Point<Dim> eval_grad(const Field<Dim>& u, std::size_t c, const std::type_identity_t<Point<Dim>>& ref) {
  u.check_cell(c);
  Point<Dim> g{};
  for (int d = 0; d < Dim; ++d) {
    g[d] = u.space().derivative_scale(d) * detail::dot<Dim>(basis_derivatives<Dim>(ref, d, 1), u.cell(c));
  }
  return g;
}

/// Physical Hessian at reference point `ref` of cell c.
template <int Dim>
std::array<Point<Dim>, Dim> eval_second(const Field<Dim>& u, std::size_t c, const std::type_identity_t<Point<Dim>>& ref) {
  u.check_cell(c);
  std::array<Point<Dim>, Dim> H{};
  for (int a = 0; a < Dim; ++a) {
    for (int b = 0; b < Dim; ++b) {
      const auto phi = a == b ? basis_derivatives<Dim>(ref, a, 2) : basis_mixed_derivatives<Dim>(ref, a, b);
      H[a][b] = u.space().derivative_scale(a) * u.space().derivative_scale(b) * detail::dot<Dim>(phi, u.cell(c));
    }
  }
  return H;
}

/// Value at a physical point (located on the mesh).
template <int Dim>
double eval_at(const Field<Dim>& u, const std::type_identity_t<Point<Dim>>& x) {
  const std::size_t c = u.mesh().locate(x);
  return eval(u, c, u.mesh().to_reference(c, x));
}

/// Piecewise L2 projection of f onto the space, by the space's tensor Gauss rule.
template <int Dim, class F>
Field<Dim> project_l2(const F& f, std::shared_ptr<const DgSpace<Dim>> space, FieldRole role = FieldRole::density) {
  Field<Dim> u(std::move(space), role);
  const auto& sp = u.space();
  const auto& nodes = sp.volume_nodes();
  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    double* coef = u.cell(c);
    // Higher modes use values relative to the first node so constants project exactly.
    double f0 = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const auto& node = nodes[q];
      const double fv = detail::call_at<Dim>(f, sp.mesh().to_physical(c, node.ref));
      if (q == 0) f0 = fv;
      coef[0] += node.weight * fv * node.phi[0];
      for (int b = 1; b < Basis<Dim>::size; ++b) coef[b] += node.weight * (fv - f0) * node.phi[b];
    }
    for (int b = 0; b < Basis<Dim>::size; ++b) coef[b] /= basis_norm_squared<Dim>(b);
  }
  return u;
}

/// Plain cell average (coefficient of the constant mode).
template <int Dim>
double cell_average(const Field<Dim>& u, std::size_t c) {
  u.check_cell(c);
  return u.cell(c)[0];
}

/// M-weighted average of u over cell c; `weight` holds M at the cell's volume nodes.
template <int Dim>
double weighted_cell_average(const Field<Dim>& u, std::size_t c, std::span<const double> weight) {
  u.check_cell(c);
  const auto& nodes = u.space().volume_nodes();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double wm = nodes[q].weight * weight[q];
    num += wm * detail::dot<Dim>(nodes[q].phi, u.cell(c));
    den += wm;
  }
  if (!(den > 0.0)) throw std::domain_error("weighted_cell_average: nonpositive weight integral");
  return num / den;
}

/// Sum over cells of the integral of |u - reference|.
template <int Dim, class F>
double l1_error(const Field<Dim>& u, const F& reference) {
  const auto& sp = u.space();
  const double jac = sp.volume_jacobian();
  double err = 0.0;
  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    for (std::size_t q = 0; q < sp.num_volume_nodes(); ++q) {
      const auto& node = sp.volume_node(q);
      const double ref = detail::call_at<Dim>(reference, sp.mesh().to_physical(c, node.ref));
      err += jac * node.weight * std::abs(u.node_value(c, q) - ref);
    }
  }
  return err;
}

/// l1 distance between two fields on possibly different meshes of the same
/// domain, integrated on the mesh of `u`.
template <int Dim>
double l1_difference(const Field<Dim>& u, const Field<Dim>& reference) {
  return l1_error(u, [&reference](const Point<Dim>& x) { return eval_at(reference, x); });
}

/// Integral of u over the whole domain.
template <int Dim>
double integral(const Field<Dim>& u) {
  double s = 0.0;
  for (std::size_t c = 0; c < u.num_cells(); ++c) s += u.cell(c)[0];
  return s * u.mesh().cell_measure();
}

/// One-sided data at a face quadrature node. Derivatives are along the
/// positive axis direction (the normal pointing from the minus to the plus cell).
struct FaceTrace {
  double minus = 0.0;
  double plus = 0.0;
  double dn_minus = 0.0;
  double dn_plus = 0.0;
  double dnn_minus = 0.0;
  double dnn_plus = 0.0;
  double h = 1.0;  // mesh size normal to the face
  bool has_minus = true;
  bool has_plus = true;

  double jump() const { return plus - minus; }
  double average() const { return 0.5 * (minus + plus); }
  double jump_dn() const { return dn_plus - dn_minus; }
  double average_dn() const { return 0.5 * (dn_minus + dn_plus); }
  double jump_dnn() const { return dnn_plus - dnn_minus; }
  double average_dnn() const { return 0.5 * (dnn_minus + dnn_plus); }
  bool interior() const { return has_minus && has_plus; }
};

/// Trace of u at transverse node `node` of face `face_index` (node 0 in 1D).
/// On a boundary face the missing side mirrors the present one, so the
/// jump is zero and the average is the one-sided value.
template <int Dim>
FaceTrace face_trace(const Field<Dim>& u, std::size_t face_index, std::size_t node = 0) {
  const auto& sp = u.space();
  const Face& f = sp.mesh().faces().at(face_index);
  const int d = f.direction;
  const double s1 = sp.derivative_scale(d);
  FaceTrace t;
  t.h = sp.mesh().size(d);
  t.has_minus = f.minus.has_value();
  t.has_plus = f.plus.has_value();
  if (f.minus) {
    const auto& fn = sp.face_nodes(d, true).at(node);
    const double* cf = u.cell(*f.minus);
    t.minus = detail::dot<Dim>(fn.phi, cf);
    t.dn_minus = s1 * detail::dot<Dim>(fn.dn, cf);
    t.dnn_minus = s1 * s1 * detail::dot<Dim>(fn.dnn, cf);
  }
  if (f.plus) {
    const auto& fn = sp.face_nodes(d, false).at(node);
    const double* cf = u.cell(*f.plus);
    t.plus = detail::dot<Dim>(fn.phi, cf);
    t.dn_plus = s1 * detail::dot<Dim>(fn.dn, cf);
    t.dnn_plus = s1 * s1 * detail::dot<Dim>(fn.dnn, cf);
  }
  if (!f.minus) {
    t.minus = t.plus;
    t.dn_minus = t.dn_plus;
    t.dnn_minus = t.dnn_plus;
  }
  if (!f.plus) {
    t.plus = t.minus;
    t.dn_plus = t.dn_minus;
    t.dnn_plus = t.dnn_minus;
  }
  return t;
}

}  // namespace ddgpnp
