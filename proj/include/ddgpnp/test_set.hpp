#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ddgpnp/errors.hpp"
#include "ddgpnp/weight.hpp"

namespace ddgpnp {

/// Weighted moments m_k = <xi^k> = (1/2) int_{-1}^{1} xi^k M dxi along one line.
struct LineMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

/// Moments from samples of M at the Gauss nodes of `rule`.
template <class Values>
LineMoments line_moments(const QuadRule& rule, const Values& M) {
  LineMoments m;
  for (int i = 0; i < rule.order; ++i) {
    const double w = 0.5 * rule.weights[i] * M[static_cast<std::size_t>(i)];
    const double x = rule.nodes[i];
    m.m0 += w;
    m.m1 += w * x;
    m.m2 += w * x * x;
  }
  return m;
}

struct TestInterval {
  double a = 0.0;
  double b = 0.0;
};

/// a = <xi - xi^2>/<1 - xi>, b = <xi + xi^2>/<1 + xi>.
inline TestInterval test_interval(const LineMoments& m) {
  TestInterval t{(m.m1 - m.m2) / (m.m0 - m.m1), (m.m1 + m.m2) / (m.m0 + m.m1)};
  if (!(-1.0 < t.a && t.a < t.b && t.b < 1.0)) {
    throw NumericalError("test_interval: expected -1 < a < b < 1, got a = " + std::to_string(t.a) +
                         ", b = " + std::to_string(t.b));
  }
  return t;
}

/// Midpoint of (a, b), clamped to |gamma| <= 8 beta1 - 1. The cap is skipped
/// when `enforce_cap` is false (parameters outside the positivity range).
/// Throws InadmissibleCell when the clamped value leaves (a, b).
inline double choose_gamma(double a, double b, double beta1, bool enforce_cap = true, std::size_t cell = 0) {
  double g = 0.5 * (a + b);
  if (enforce_cap) {
    const double cap = 8.0 * beta1 - 1.0;
    if (cap < 0.0) {
      throw InadmissibleCell("choose_gamma: beta1 = " + std::to_string(beta1) + " gives a negative cap 8 beta1 - 1",
                             cell);
    }
    g = std::clamp(g, -cap, cap);
    if (!(a < g && g < b)) {
      throw InadmissibleCell("choose_gamma: capped gamma " + std::to_string(g) + " outside (" + std::to_string(a) +
                                 ", " + std::to_string(b) + ") in cell " + std::to_string(cell),
                             cell);
    }
  }
  return g;
}

struct DecompositionWeights {
  double w1 = 0.0;  // weight of p(-1)
  double w2 = 0.0;  // weight of p(gamma)
  double w3 = 0.0;  // weight of p(1)
};

/// Weights with <p> = w1 p(-1) + w2 p(gamma) + w3 p(1) for every quadratic p.
/// They are the weighted averages of the Lagrange basis on {-1, gamma, 1}.
inline DecompositionWeights decomposition_weights(const LineMoments& m, double gamma) {
  DecompositionWeights w;
  w.w1 = (gamma * m.m0 - (1.0 + gamma) * m.m1 + m.m2) / (2.0 * (1.0 + gamma));
  w.w2 = (m.m0 - m.m2) / (1.0 - gamma * gamma);
  w.w3 = (-gamma * m.m0 + (1.0 - gamma) * m.m1 + m.m2) / (2.0 * (1.0 - gamma));
  return w;
}

/// Test data of one quadrature line through a cell.
struct LineTest {
  double a = 0.0;
  double b = 0.0;
  double gamma = 0.0;
  DecompositionWeights weights;
  LineMoments moments;
};

struct TestSetOptions {
  double beta1 = 1.0 / 6.0;
  bool enforce_cap = true;
};

/// Admissible test points of every cell. In 1D one line per cell; in 2D one
/// line per (axis, transverse Gauss node), so 2L lines and 6L points per cell.
template <int Dim>
class TestSet {
 public:
  TestSet() = default;
  TestSet(const WeightField<Dim>& M, const TestSetOptions& opt)
      : space_(&M.space()) {
    const auto& sp = *space_;
    const std::size_t L = sp.num_face_nodes();
    const std::size_t n = static_cast<std::size_t>(sp.points_per_axis());
    lines_per_axis_ = L;
    lines_.resize(sp.num_cells() * Dim * L);
    std::vector<double> samples(n);
    for (std::size_t c = 0; c < sp.num_cells(); ++c) {
      for (int d = 0; d < Dim; ++d) {
        for (std::size_t r = 0; r < L; ++r) {
          for (std::size_t t = 0; t < n; ++t) samples[t] = M.at(c, sp.line_node(d, r, t));
          LineTest& lt = lines_[index(c, d, r)];
          lt.moments = line_moments(sp.rule(), samples);
          TestInterval ab;
          try {
            ab = test_interval(lt.moments);
          } catch (const NumericalError& e) {
            throw InadmissibleCell(std::string(e.what()) + " in cell " + std::to_string(c), c);
          }
          lt.a = ab.a;
          lt.b = ab.b;
          lt.gamma = choose_gamma(ab.a, ab.b, opt.beta1, opt.enforce_cap, c);
          lt.weights = decomposition_weights(lt.moments, lt.gamma);
          if (!(lt.weights.w1 > 0.0 && lt.weights.w2 > 0.0 && lt.weights.w3 > 0.0)) {
            throw InadmissibleCell("decomposition weight not positive in cell " + std::to_string(c), c);
          }
        }
      }
    }
  }

  const DgSpace<Dim>& space() const { return *space_; }
  std::size_t lines_per_axis() const { return lines_per_axis_; }
  std::size_t points_per_cell() const { return 3 * Dim * lines_per_axis_; }
  const LineTest& line(std::size_t c, int d, std::size_t r) const { return lines_[index(c, d, r)]; }

  /// Reference coordinates of the 3 test points of line (d, r) in a cell.
  std::array<Point<Dim>, 3> line_points(std::size_t c, int d, std::size_t r) const {
    std::array<Point<Dim>, 3> pts{};
    const double gam = line(c, d, r).gamma;
    const std::array<double, 3> xs{-1.0, gam, 1.0};
    for (int i = 0; i < 3; ++i) {
      pts[i][d] = xs[i];
      if constexpr (Dim == 2) pts[i][1 - d] = space_->rule().nodes[r];
    }
    return pts;
  }

  /// All test points of cell c in reference coordinates.
  std::vector<Point<Dim>> points(std::size_t c) const {
    std::vector<Point<Dim>> out;
    out.reserve(points_per_cell());
    for (int d = 0; d < Dim; ++d) {
      for (std::size_t r = 0; r < lines_per_axis_; ++r) {
        for (const auto& p : line_points(c, d, r)) out.push_back(p);
      }
    }
    return out;
  }

  /// Minimum of w over the test points of cell c.
  double min_on_cell(const Field<Dim>& w, std::size_t c) const {
    double m = std::numeric_limits<double>::infinity();
    const double* cf = w.cell(c);
    for (int d = 0; d < Dim; ++d) {
      for (std::size_t r = 0; r < lines_per_axis_; ++r) {
        const auto& fl = space_->face_nodes(d, false)[r];
        const auto& fu = space_->face_nodes(d, true)[r];
        m = std::min(m, detail::dot<Dim>(fl.phi, cf));
        m = std::min(m, detail::dot<Dim>(fu.phi, cf));
        Point<Dim> p = fl.ref;
        p[d] = line(c, d, r).gamma;
        m = std::min(m, detail::dot<Dim>(basis_values<Dim>(p), cf));
      }
    }
    return m;
  }

  /// Minimum of w over every test point of the mesh.
  double min_on_mesh(const Field<Dim>& w) const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < space_->num_cells(); ++c) m = std::min(m, min_on_cell(w, c));
    return m;
  }

 private:
  std::size_t index(std::size_t c, int d, std::size_t r) const {
    return (c * Dim + static_cast<std::size_t>(d)) * lines_per_axis_ + r;
  }

  const DgSpace<Dim>* space_ = nullptr;
  std::size_t lines_per_axis_ = 1;
  std::vector<LineTest> lines_;
};

}  // namespace ddgpnp
