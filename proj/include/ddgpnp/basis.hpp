#pragma once

#include <array>

#include "ddgpnp/mesh.hpp"

namespace ddgpnp {

/// Legendre polynomials L_0..L_2 on [-1, 1] and their derivatives.
inline double legendre(int k, double x) {
  switch (k) {
    case 0: return 1.0;
    case 1: return x;
    default: return 1.5 * x * x - 0.5;
  }
}
inline double legendre_d1(int k, double x) {
  switch (k) {
    case 0: return 0.0;
    case 1: return 1.0;
    default: return 3.0 * x;
  }
}
inline double legendre_d2(int k, double /*x*/) { return k == 2 ? 3.0 : 0.0; }

/// Modal P2 basis on the reference element [-1, 1]^Dim.
///
/// 1D: {L0, L1, L2}. 2D: the total-degree-2 tensor products
/// {L0L0, L1L0, L0L1, L2L0, L1L1, L0L2}. The first function is the constant
/// 1, so coefficient 0 of any field is its cell average.
template <int Dim>
struct Basis;

template <>
struct Basis<1> {
  static constexpr int size = 3;
  static constexpr int degree = 2;
  static constexpr std::array<std::array<int, 1>, 3> degrees{{{0}, {1}, {2}}};
};

template <>
struct Basis<2> {
  static constexpr int size = 6;
  static constexpr int degree = 2;
  static constexpr std::array<std::array<int, 2>, 6> degrees{
      {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};
};

template <int Dim>
using BasisValues = std::array<double, Basis<Dim>::size>;

template <int Dim>
BasisValues<Dim> basis_values(const Point<Dim>& xi) {
  BasisValues<Dim> out{};
  for (int b = 0; b < Basis<Dim>::size; ++b) {
    double v = 1.0;
    for (int d = 0; d < Dim; ++d) v *= legendre(Basis<Dim>::degrees[b][d], xi[d]);
    out[b] = v;
  }
  return out;
}

/// Reference derivative of every basis function along axis `axis`, `order` times (0..2).
template <int Dim>
BasisValues<Dim> basis_derivatives(const Point<Dim>& xi, int axis, int order) {
  BasisValues<Dim> out{};
  for (int b = 0; b < Basis<Dim>::size; ++b) {
    double v = 1.0;
    for (int d = 0; d < Dim; ++d) {
      const int k = Basis<Dim>::degrees[b][d];
      if (d != axis) {
        v *= legendre(k, xi[d]);
      } else if (order == 0) {
        v *= legendre(k, xi[d]);
      } else if (order == 1) {
        v *= legendre_d1(k, xi[d]);
      } else {
        v *= legendre_d2(k, xi[d]);
      }
    }
    out[b] = v;
  }
  return out;
}

/// Mixed reference derivative d^2/(dxi_a dxi_b), a != b.
template <int Dim>
BasisValues<Dim> basis_mixed_derivatives(const Point<Dim>& xi, int a, int b_axis) {
  BasisValues<Dim> out{};
  for (int b = 0; b < Basis<Dim>::size; ++b) {
    double v = 1.0;
    for (int d = 0; d < Dim; ++d) {
      const int k = Basis<Dim>::degrees[b][d];
      v *= (d == a || d == b_axis) ? legendre_d1(k, xi[d]) : legendre(k, xi[d]);
    }
    out[b] = v;
  }
  return out;
}

/// Integral of phi_b^2 over the reference element.
template <int Dim>
constexpr double basis_norm_squared(int b) {
  double n = 1.0;
  for (int d = 0; d < Dim; ++d) n *= 2.0 / (2.0 * Basis<Dim>::degrees[b][d] + 1.0);
  return n;
}

}  // namespace ddgpnp
