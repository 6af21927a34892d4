#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddgpnp {

template <int Dim>
using Point = std::array<double, Dim>;

/// A face orthogonal to axis `direction`. `minus` is the cell on the lower
/// side, `plus` the cell on the upper side; one of them is empty on the
/// domain boundary. Normals point from minus to plus.
struct Face {
  int direction = 0;
  int position = 0;  // interface number along `direction`, 0..N_d
  std::optional<std::size_t> minus;
  std::optional<std::size_t> plus;

  bool interior() const { return minus.has_value() && plus.has_value(); }
  /// Boundary side id 2*direction + (1 if upper side of the domain).
  int boundary_side() const { return 2 * direction + (plus ? 0 : 1); }
  std::size_t any_cell() const { return minus ? *minus : *plus; }
};

/// Uniform tensor-product mesh of a box in Dim dimensions (Dim = 1 or 2).
/// Cells are numbered with the x index running fastest.
template <int Dim>
class Mesh {
  static_assert(Dim == 1 || Dim == 2, "only 1D and 2D meshes are supported");

 public:
  static constexpr int dimension = Dim;
  static constexpr int num_sides = 2 * Dim;

  Mesh(const Point<Dim>& lower, const Point<Dim>& upper, const std::array<int, Dim>& cells)
      : lower_(lower), upper_(upper), cells_(cells) {
    for (int d = 0; d < Dim; ++d) {
      if (!(upper[d] > lower[d]) || !std::isfinite(upper[d] - lower[d])) {
        throw std::invalid_argument("Mesh: empty or invalid extent along axis " + std::to_string(d));
      }
      if (cells[d] < 2) {
        throw std::invalid_argument("Mesh: need at least 2 cells along axis " + std::to_string(d) +
                                    ", got " + std::to_string(cells[d]));
      }
      size_[d] = (upper[d] - lower[d]) / cells[d];
    }
    num_cells_ = 1;
    for (int d = 0; d < Dim; ++d) num_cells_ *= static_cast<std::size_t>(cells_[d]);
    build_faces();
  }

  int cells(int d) const { return cells_[d]; }
  double size(int d) const { return size_[d]; }
  double lower(int d) const { return lower_[d]; }
  double upper(int d) const { return upper_[d]; }
  std::size_t num_cells() const { return num_cells_; }

  double cell_measure() const {
    double m = 1.0;
    for (int d = 0; d < Dim; ++d) m *= size_[d];
    return m;
  }
  double domain_measure() const { return cell_measure() * static_cast<double>(num_cells_); }
  /// Smallest mesh size over the axes.
  double min_size() const {
    double h = size_[0];
    for (int d = 1; d < Dim; ++d) h = std::min(h, size_[d]);
    return h;
  }

  std::array<int, Dim> cell_coords(std::size_t c) const {
    std::array<int, Dim> idx{};
    for (int d = 0; d < Dim; ++d) {
      idx[d] = static_cast<int>(c % static_cast<std::size_t>(cells_[d]));
      c /= static_cast<std::size_t>(cells_[d]);
    }
    return idx;
  }

  std::size_t cell_id(const std::array<int, Dim>& idx) const {
    std::size_t c = 0;
    for (int d = Dim - 1; d >= 0; --d) c = c * static_cast<std::size_t>(cells_[d]) + idx[d];
    return c;
  }

  /// Coordinate of interface k along axis d (k = 0..N_d).
  double interface(int d, int k) const {
    return k == cells_[d] ? upper_[d] : lower_[d] + k * size_[d];
  }

  Point<Dim> center(std::size_t c) const {
    const auto idx = cell_coords(c);
    Point<Dim> x{};
    for (int d = 0; d < Dim; ++d) x[d] = lower_[d] + (idx[d] + 0.5) * size_[d];
    return x;
  }

  /// Affine image of a reference point in [-1, 1]^Dim.
  Point<Dim> to_physical(std::size_t c, const Point<Dim>& ref) const {
    Point<Dim> x = center(c);
    for (int d = 0; d < Dim; ++d) x[d] += 0.5 * size_[d] * ref[d];
    return x;
  }

  Point<Dim> to_reference(std::size_t c, const Point<Dim>& x) const {
    const Point<Dim> xc = center(c);
    Point<Dim> ref{};
    for (int d = 0; d < Dim; ++d) ref[d] = 2.0 * (x[d] - xc[d]) / size_[d];
    return ref;
  }

  /// Cell containing x (points on an interface go to the upper cell, the
  /// domain's upper boundary to the last cell).
  std::size_t locate(const Point<Dim>& x) const {
    std::array<int, Dim> idx{};
    for (int d = 0; d < Dim; ++d) {
      int k = static_cast<int>(std::floor((x[d] - lower_[d]) / size_[d]));
      if (k < 0 || k > cells_[d]) {
        throw std::out_of_range("Mesh::locate: point outside the domain");
      }
      idx[d] = std::min(k, cells_[d] - 1);
    }
    return cell_id(idx);
  }

  std::optional<std::size_t> neighbor(std::size_t c, int d, bool upper_side) const {
    auto idx = cell_coords(c);
    idx[d] += upper_side ? 1 : -1;
    if (idx[d] < 0 || idx[d] >= cells_[d]) return std::nullopt;
    return cell_id(idx);
  }

  const std::vector<Face>& faces() const { return faces_; }
  std::size_t num_interior_faces() const { return num_interior_faces_; }

  /// Index into faces() of the face on the given side of cell c.
  std::size_t face_of(std::size_t c, int d, bool upper_side) const {
    const auto idx = cell_coords(c);
    return face_offset_[d] + static_cast<std::size_t>(idx[d] + (upper_side ? 1 : 0)) +
           static_cast<std::size_t>(cells_[d] + 1) * transverse_index(idx, d);
  }

 private:
  std::size_t transverse_index(const std::array<int, Dim>& idx, int d) const {
    if constexpr (Dim == 1) {
      return 0;
    } else {
      return static_cast<std::size_t>(idx[1 - d]);
    }
  }

  void build_faces() {
    faces_.clear();
    num_interior_faces_ = 0;
    for (int d = 0; d < Dim; ++d) {
      face_offset_[d] = faces_.size();
      std::size_t transverse = 1;
      if constexpr (Dim == 2) transverse = static_cast<std::size_t>(cells_[1 - d]);
      for (std::size_t t = 0; t < transverse; ++t) {
        for (int k = 0; k <= cells_[d]; ++k) {
          Face f;
          f.direction = d;
          f.position = k;
          std::array<int, Dim> idx{};
          if constexpr (Dim == 2) idx[1 - d] = static_cast<int>(t);
          if (k > 0) {
            idx[d] = k - 1;
            f.minus = cell_id(idx);
          }
          if (k < cells_[d]) {
            idx[d] = k;
            f.plus = cell_id(idx);
          }
          if (f.interior()) ++num_interior_faces_;
          faces_.push_back(f);
        }
      }
    }
  }

  Point<Dim> lower_;
  Point<Dim> upper_;
  std::array<int, Dim> cells_;
  Point<Dim> size_{};
  std::size_t num_cells_ = 0;
  std::vector<Face> faces_;
  std::array<std::size_t, Dim> face_offset_{};
  std::size_t num_interior_faces_ = 0;
};

inline Mesh<1> build_mesh_1d(double x_lo, double x_hi, int n) {
  return Mesh<1>({x_lo}, {x_hi}, {n});
}

/// Mesh of [0, lx] x [0, ly] with p x q cells.
inline Mesh<2> build_mesh_2d(double lx, double ly, int p, int q) {
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("build_mesh_2d: nonpositive domain size");
  return Mesh<2>({0.0, 0.0}, {lx, ly}, {p, q});
}

}  // namespace ddgpnp
