#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "ddgpnp/basis.hpp"
#include "ddgpnp/mesh.hpp"
#include "ddgpnp/quadrature.hpp"

namespace ddgpnp {

/// The discrete space V_h: a mesh, the P2 modal basis and the tensor Gauss
/// rule used for every volume and face integral, with basis tables
/// precomputed at all reference quadrature nodes.
template <int Dim>
class DgSpace {
 public:
  static constexpr int num_basis = Basis<Dim>::size;
  static constexpr int default_points = 4;

  struct VolumeNode {
    Point<Dim> ref{};
    double weight = 0.0;  // tensor product of raw Gauss weights (sum 2^Dim)
    BasisValues<Dim> phi{};
    std::array<BasisValues<Dim>, Dim> dphi{};  // reference gradient
  };

  struct FaceNode {
    Point<Dim> ref{};
    double weight = 0.0;  // transverse Gauss weight (1 in 1D)
    BasisValues<Dim> phi{};
    BasisValues<Dim> dn{};   // reference derivative along the face normal axis
    BasisValues<Dim> dnn{};  // second reference derivative along the normal axis
  };

  explicit DgSpace(Mesh<Dim> mesh, int points_per_axis = default_points)
      : mesh_(std::move(mesh)), rule_(gauss_rule(points_per_axis)) {
    const int n = rule_.order;
    num_volume_nodes_ = 1;
    for (int d = 0; d < Dim; ++d) num_volume_nodes_ *= static_cast<std::size_t>(n);
    num_face_nodes_ = num_volume_nodes_ / static_cast<std::size_t>(n);

    volume_.resize(num_volume_nodes_);
    for (std::size_t q = 0; q < num_volume_nodes_; ++q) {
      VolumeNode& node = volume_[q];
      std::size_t rest = q;
      node.weight = 1.0;
      for (int d = 0; d < Dim; ++d) {
        const std::size_t i = rest % static_cast<std::size_t>(n);
        rest /= static_cast<std::size_t>(n);
        node.ref[d] = rule_.nodes[i];
        node.weight *= rule_.weights[i];
      }
      node.phi = basis_values<Dim>(node.ref);
      for (int d = 0; d < Dim; ++d) node.dphi[d] = basis_derivatives<Dim>(node.ref, d, 1);
    }

    for (int d = 0; d < Dim; ++d) {
      for (int s = 0; s < 2; ++s) {
        auto& table = faces_[d][s];
        table.resize(num_face_nodes_);
        for (std::size_t r = 0; r < num_face_nodes_; ++r) {
          FaceNode& node = table[r];
          node.ref[d] = s == 0 ? -1.0 : 1.0;
          node.weight = 1.0;
          if constexpr (Dim == 2) {
            node.ref[1 - d] = rule_.nodes[r];
            node.weight = rule_.weights[r];
          }
          node.phi = basis_values<Dim>(node.ref);
          node.dn = basis_derivatives<Dim>(node.ref, d, 1);
          node.dnn = basis_derivatives<Dim>(node.ref, d, 2);
        }
      }
    }
  }

  const Mesh<Dim>& mesh() const { return mesh_; }
  const QuadRule& rule() const { return rule_; }
  int points_per_axis() const { return rule_.order; }
  std::size_t num_cells() const { return mesh_.num_cells(); }
  std::size_t num_dofs() const { return mesh_.num_cells() * num_basis; }

  std::size_t num_volume_nodes() const { return num_volume_nodes_; }
  std::size_t num_face_nodes() const { return num_face_nodes_; }
  const std::vector<VolumeNode>& volume_nodes() const { return volume_; }
  const VolumeNode& volume_node(std::size_t q) const { return volume_[q]; }
  /// Nodes on the lower (upper_side = false) or upper face of the reference cell along axis d.
  const std::vector<FaceNode>& face_nodes(int d, bool upper_side) const { return faces_[d][upper_side ? 1 : 0]; }

  /// dx = volume_jacobian() * dxi on every cell.
  double volume_jacobian() const { return mesh_.cell_measure() / static_cast<double>(1 << Dim); }
  /// ds = face_jacobian(d) * deta on faces orthogonal to axis d.
  double face_jacobian(int d) const {
    double j = 1.0;
    for (int e = 0; e < Dim; ++e) {
      if (e != d) j *= 0.5 * mesh_.size(e);
    }
    return j;
  }
  /// d/dx_d = derivative_scale(d) * d/dxi_d.
  double derivative_scale(int d) const { return 2.0 / mesh_.size(d); }

  /// Volume node lying on the quadrature line along axis d through transverse
  /// node r (the same r that indexes face_nodes(d, .)), at position tau.
  std::size_t line_node(int d, std::size_t r, std::size_t tau) const {
    if constexpr (Dim == 1) {
      (void)d;
      (void)r;
      return tau;
    } else {
      const std::size_t n = static_cast<std::size_t>(rule_.order);
      return d == 0 ? tau + n * r : r + n * tau;
    }
  }

  /// Physical coordinates of every volume node of cell c.
  Point<Dim> volume_point(std::size_t c, std::size_t q) const { return mesh_.to_physical(c, volume_[q].ref); }

 private:
  Mesh<Dim> mesh_;
  QuadRule rule_;
  std::size_t num_volume_nodes_ = 0;
  std::size_t num_face_nodes_ = 0;
  std::vector<VolumeNode> volume_;
  std::array<std::array<std::vector<FaceNode>, 2>, Dim> faces_;
};

template <int Dim>
std::shared_ptr<const DgSpace<Dim>> make_space(Mesh<Dim> mesh, int points_per_axis = DgSpace<Dim>::default_points) {
  return std::make_shared<const DgSpace<Dim>>(std::move(mesh), points_per_axis);
}

}  // namespace ddgpnp
