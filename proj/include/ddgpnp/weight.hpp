#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddgpnp/errors.hpp"
#include "ddgpnp/field.hpp"

namespace ddgpnp {

/// Largest |q psi| accepted when forming exp(-q psi).
inline constexpr double max_weight_exponent = 700.0;

/// M = exp(-q psi) sampled at every volume quadrature node and at both
/// traces of every face quadrature node. On boundary faces both traces hold
/// the interior value.
template <int Dim>
class WeightField {
 public:
  WeightField() = default;
  WeightField(std::shared_ptr<const DgSpace<Dim>> space, double q)
      : space_(std::move(space)), q_(q) {
    volume_.assign(space_->num_cells() * space_->num_volume_nodes(), 1.0);
    const std::size_t nf = space_->mesh().faces().size() * space_->num_face_nodes();
    minus_.assign(nf, 1.0);
    plus_.assign(nf, 1.0);
  }

  const DgSpace<Dim>& space() const { return *space_; }
  double charge() const { return q_; }

  std::span<const double> cell_values(std::size_t c) const {
    return {volume_.data() + c * space_->num_volume_nodes(), space_->num_volume_nodes()};
  }
  std::span<double> cell_values(std::size_t c) {
    return {volume_.data() + c * space_->num_volume_nodes(), space_->num_volume_nodes()};
  }
  double at(std::size_t c, std::size_t q) const { return volume_[c * space_->num_volume_nodes() + q]; }
  double& at(std::size_t c, std::size_t q) { return volume_[c * space_->num_volume_nodes() + q]; }

  double face_minus(std::size_t f, std::size_t r) const { return minus_[f * space_->num_face_nodes() + r]; }
  double face_plus(std::size_t f, std::size_t r) const { return plus_[f * space_->num_face_nodes() + r]; }
  double& face_minus(std::size_t f, std::size_t r) { return minus_[f * space_->num_face_nodes() + r]; }
  double& face_plus(std::size_t f, std::size_t r) { return plus_[f * space_->num_face_nodes() + r]; }
  /// {M} at face node r of face f.
  double face_average(std::size_t f, std::size_t r) const { return 0.5 * (face_minus(f, r) + face_plus(f, r)); }

  /// Multiply every stored value by s (s > 0).
  void scale(double s) {
    for (auto* v : {&volume_, &minus_, &plus_}) {
      for (double& x : *v) x *= s;
    }
  }

 private:
  std::shared_ptr<const DgSpace<Dim>> space_;
  double q_ = 0.0;
  std::vector<double> volume_;
  std::vector<double> minus_;
  std::vector<double> plus_;
};

namespace detail {

inline double checked_weight(double q, double psi, std::size_t cell) {
  const double e = -q * psi;
  if (!(std::abs(e) <= max_weight_exponent)) {
    throw NumericalError("weight exponent |q psi| = " + std::to_string(std::abs(e)) + " exceeds " +
                         std::to_string(max_weight_exponent) + " in cell " + std::to_string(cell));
  }
  return std::exp(e);
}

}  // namespace detail

/// M = exp(-q psi) at all volume and face nodes.
template <int Dim>
WeightField<Dim> build_weight(const Field<Dim>& psi, double q) {
  const auto& sp = psi.space();
  WeightField<Dim> M(psi.space_ptr(), q);
  if (q == 0.0) return M;
  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    for (std::size_t n = 0; n < sp.num_volume_nodes(); ++n) M.at(c, n) = detail::checked_weight(q, psi.node_value(c, n), c);
  }
  const auto& faces = sp.mesh().faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& face = faces[f];
    const int d = face.direction;
    for (std::size_t r = 0; r < sp.num_face_nodes(); ++r) {
      if (face.minus) {
        M.face_minus(f, r) = detail::checked_weight(q, detail::dot<Dim>(sp.face_nodes(d, true)[r].phi, psi.cell(*face.minus)), *face.minus);
      }
      if (face.plus) {
        M.face_plus(f, r) = detail::checked_weight(q, detail::dot<Dim>(sp.face_nodes(d, false)[r].phi, psi.cell(*face.plus)), *face.plus);
      }
      if (!face.minus) M.face_minus(f, r) = M.face_plus(f, r);
      if (!face.plus) M.face_plus(f, r) = M.face_minus(f, r);
    }
  }
  return M;
}

/// Weight fields for several charges sharing one potential. exp(-psi) is
/// computed once; charges +-1 and 0 reuse it without further exponentials.
template <int Dim>
std::vector<WeightField<Dim>> build_weights(const Field<Dim>& psi, const std::vector<double>& charges) {
  std::vector<WeightField<Dim>> out;
  out.reserve(charges.size());
  bool simple = true;
  for (double q : charges) simple = simple && (q == 1.0 || q == -1.0 || q == 0.0);
  if (!simple) {
    for (double q : charges) out.push_back(build_weight(psi, q));
    return out;
  }
  // Reference field for q = 1; the others are reciprocals or ones.
  const WeightField<Dim> base = build_weight(psi, 1.0);
  for (double q : charges) {
    if (q == 1.0) {
      out.push_back(base);
    } else if (q == 0.0) {
      out.emplace_back(psi.space_ptr(), 0.0);
    } else {
      WeightField<Dim> inv(psi.space_ptr(), -1.0);
      const auto& sp = psi.space();
      for (std::size_t c = 0; c < sp.num_cells(); ++c) {
        for (std::size_t n = 0; n < sp.num_volume_nodes(); ++n) inv.at(c, n) = 1.0 / base.at(c, n);
      }
      for (std::size_t f = 0; f < sp.mesh().faces().size(); ++f) {
        for (std::size_t r = 0; r < sp.num_face_nodes(); ++r) {
          inv.face_minus(f, r) = 1.0 / base.face_minus(f, r);
          inv.face_plus(f, r) = 1.0 / base.face_plus(f, r);
        }
      }
      out.push_back(std::move(inv));
    }
  }
  return out;
}

/// g with  int_K g M r = int_K c r  for every basis function r, cell by cell.
template <int Dim>
Field<Dim> weighted_projection(const Field<Dim>& c, const WeightField<Dim>& M) {
  constexpr int nb = Basis<Dim>::size;
  const auto& sp = c.space();
  Field<Dim> g(c.space_ptr(), FieldRole::auxiliary);
  const auto& nodes = sp.volume_nodes();
  for (std::size_t k = 0; k < sp.num_cells(); ++k) {
    // A = M0 D + sum w (M - M0) phi phi^T, so a constant weight yields an exactly diagonal system.
    const double m0 = M.at(k, 0);
    Eigen::Matrix<double, nb, nb> A = Eigen::Matrix<double, nb, nb>::Zero();
    for (int a = 0; a < nb; ++a) A(a, a) = m0 * basis_norm_squared<Dim>(a);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double mq = M.at(k, q);
      if (!(mq > 0.0)) throw NumericalError("weighted_projection: nonpositive weight in cell " + std::to_string(k));
      const double wm = nodes[q].weight * (mq - m0);
      if (wm == 0.0) continue;
      const auto& phi = nodes[q].phi;
      for (int b = 0; b < nb; ++b) {
        const double wb = wm * phi[b];
        for (int a = b; a < nb; ++a) A(a, b) += wb * phi[a];
      }
    }
    Eigen::Matrix<double, nb, 1> rhs;
    for (int a = 0; a < nb; ++a) rhs[a] = basis_norm_squared<Dim>(a) * c.cell(k)[a];
    Eigen::LLT<Eigen::Matrix<double, nb, nb>, Eigen::Lower> llt(A);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("weighted_projection: singular weighted mass matrix in cell " + std::to_string(k));
    }
    const Eigen::Matrix<double, nb, 1> x = llt.solve(rhs);
    for (int a = 0; a < nb; ++a) g.cell(k)[a] = x[a];
  }
  return g;
}

/// M-weighted average of w on cell c.
template <int Dim>
double weighted_cell_average(const Field<Dim>& w, const WeightField<Dim>& M, std::size_t c) {
  return weighted_cell_average(w, c, M.cell_values(c));
}

}  // namespace ddgpnp
