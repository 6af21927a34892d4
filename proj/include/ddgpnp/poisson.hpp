#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "ddgpnp/errors.hpp"
#include "ddgpnp/field.hpp"
#include "ddgpnp/flux.hpp"

namespace ddgpnp {

template <int Dim>
using SpaceTimeFunction = std::function<double(double t, const Point<Dim>& x)>;

/// Coercivity threshold of the DDG Poisson form: interior faces need
/// beta0 > gamma_d(k, beta1), Dirichlet faces beta0 > 2 gamma_d(k, 0).
inline double gamma_d(int k, double beta1) {
  if (k != 1 && k != 2) throw std::invalid_argument("gamma_d: unsupported degree " + std::to_string(k));
  const double m = static_cast<double>(k * k - 1);
  return k * k * (1.0 - beta1 * m + beta1 * beta1 / 3.0 * m * m);
}

enum class BoundaryKind { dirichlet, neumann };

/// Boundary data for the potential. Sides are numbered 2*axis + (0 lower, 1 upper).
/// `dirichlet` gives psi_D and `neumann` the outward normal derivative sigma;
/// an empty function means zero data.
template <int Dim>
struct PoissonBC {
  std::array<BoundaryKind, 2 * Dim> kind{};
  SpaceTimeFunction<Dim> dirichlet;
  SpaceTimeFunction<Dim> neumann;

  bool has_dirichlet() const {
    for (auto k : kind) {
      if (k == BoundaryKind::dirichlet) return true;
    }
    return false;
  }
  static PoissonBC all(BoundaryKind k) {
    PoissonBC bc;
    bc.kind.fill(k);
    return bc;
  }
};

/// Right-hand side of -Laplace(psi) = sum q_i c_i + rho0 + source.
template <int Dim>
struct LoadSpec {
  std::vector<double> charges;
  SpaceTimeFunction<Dim> rho0;    // fixed background charge (empty = 0)
  SpaceTimeFunction<Dim> source;  // extra manufactured source (empty = 0)
};

/// `interface_correction` uses {d_n eta}[psi] as the interface correction
/// term, which is unsymmetric when beta1 != 0. `symmetric` uses the
/// symmetric part of that form: the beta1 term becomes
/// beta1 h ([d_n^2 psi][eta] + [d_n^2 eta][psi]) / 2. Both forms are
/// consistent and share the same quadratic form A(eta, eta).
enum class PoissonForm { symmetric, interface_correction };

inline const char* to_string(PoissonForm f) {
  return f == PoissonForm::symmetric ? "symmetric" : "interface_correction";
}

/// Assembled and factorized DDG Poisson operator. The matrix depends only on
/// the mesh, flux parameters and boundary kinds, so it is factorized once and
/// reused for every load.
template <int Dim>
class PoissonOperator {
 public:
  static constexpr int nb = Basis<Dim>::size;
  using SparseMatrix = Eigen::SparseMatrix<double>;

  PoissonOperator(std::shared_ptr<const DgSpace<Dim>> space, FluxParams params, PoissonBC<Dim> bc,
                  PoissonForm form = PoissonForm::symmetric, bool zero_mean_gauge = false)
      : space_(std::move(space)), params_(params), bc_(std::move(bc)), form_(form), gauge_(zero_mean_gauge) {
    if (!bc_.has_dirichlet() && !gauge_) {
      throw std::invalid_argument(
          "PoissonOperator: no Dirichlet boundary; the problem is singular without the zero-mean gauge");
    }
    check_admissibility();
    assemble();
    factorize();
  }

  const DgSpace<Dim>& space() const { return *space_; }
  const FluxParams& params() const { return params_; }
  const PoissonBC<Dim>& bc() const { return bc_; }
  PoissonForm form() const { return form_; }
  bool gauge() const { return gauge_; }
  std::size_t num_dofs() const { return space_->num_dofs(); }
  /// The bilinear form matrix, A(i, j) = A(phi_j, phi_i) (row = test function).
  const SparseMatrix& matrix() const { return matrix_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Load vector L(eta) for the given densities at time t.
  Eigen::VectorXd assemble_load(const std::vector<const Field<Dim>*>& densities, const LoadSpec<Dim>& load,
                                double t) const {
    const auto& sp = *space_;
    const auto& mesh = sp.mesh();
    if (densities.size() != load.charges.size()) {
      throw std::invalid_argument("assemble_load: number of densities and charges differ");
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_dofs()));
    const double jac = sp.volume_jacobian();
    for (std::size_t i = 0; i < densities.size(); ++i) {
      const double q = load.charges[i];
      if (q == 0.0) continue;
      const Field<Dim>& c = *densities[i];
      if (c.num_cells() != sp.num_cells()) {
        throw std::invalid_argument("assemble_load: density lives on a different mesh");
      }
      for (std::size_t k = 0; k < sp.num_cells(); ++k) {
        for (int a = 0; a < nb; ++a) rhs[k * nb + a] += q * jac * basis_norm_squared<Dim>(a) * c.cell(k)[a];
      }
    }
    if (load.rho0 || load.source) {
      for (std::size_t k = 0; k < sp.num_cells(); ++k) {
        for (const auto& node : sp.volume_nodes()) {
          const Point<Dim> x = mesh.to_physical(k, node.ref);
          double f = 0.0;
          if (load.rho0) f += load.rho0(t, x);
          if (load.source) f += load.source(t, x);
          for (int a = 0; a < nb; ++a) rhs[k * nb + a] += jac * node.weight * f * node.phi[a];
        }
      }
    }
    for (const Face& face : mesh.faces()) {
      if (face.interior()) continue;
      const int d = face.direction;
      const bool upper = !face.plus.has_value();
      const std::size_t k = face.any_cell();
      const double h = mesh.size(d);
      const double sn = (upper ? 1.0 : -1.0) * sp.derivative_scale(d);
      const double fj = sp.face_jacobian(d);
      const auto kind = bc_.kind[face.boundary_side()];
      const auto& fn = sp.face_nodes(d, upper);
      for (const auto& node : fn) {
        const Point<Dim> x = mesh.to_physical(k, node.ref);
        if (kind == BoundaryKind::dirichlet) {
          if (!bc_.dirichlet) continue;
          const double g = bc_.dirichlet(t, x);
          for (int a = 0; a < nb; ++a) {
            rhs[k * nb + a] += fj * node.weight * (params_.beta0 / h * node.phi[a] - sn * node.dn[a]) * g;
          }
        } else {
          if (!bc_.neumann) continue;
          const double s = bc_.neumann(t, x);
          for (int a = 0; a < nb; ++a) rhs[k * nb + a] += fj * node.weight * s * node.phi[a];
        }
      }
    }
    return rhs;
  }

  /// Solve A psi = load; the result is a potential field.
  Field<Dim> solve(const Eigen::VectorXd& load) const {
    if (load.size() != static_cast<Eigen::Index>(num_dofs())) {
      throw std::invalid_argument("PoissonOperator::solve: load has wrong size");
    }
    Eigen::VectorXd x;
    if (gauge_) {
      Eigen::VectorXd aug = Eigen::VectorXd::Zero(load.size() + 1);
      aug.head(load.size()) = load;
      x = solve_system(aug);
    } else {
      x = solve_system(load);
    }
    if (!x.allFinite()) throw NumericalError("Poisson solve failed");
    Field<Dim> psi(space_, FieldRole::potential);
    for (std::size_t i = 0; i < num_dofs(); ++i) psi.coefficients()[i] = x[static_cast<Eigen::Index>(i)];
    return psi;
  }

  /// Relative residual of the linear system for psi (0 for a zero load). With
  /// the gauge, the Lagrange multiplier term is included.
  double residual(const Field<Dim>& psi, const Eigen::VectorXd& load) const {
    const Eigen::Map<const Eigen::VectorXd> x(psi.coefficients().data(), static_cast<Eigen::Index>(num_dofs()));
    Eigen::VectorXd r = matrix_ * x - load;
    if (gauge_) {
      Eigen::VectorXd aug = Eigen::VectorXd::Zero(load.size() + 1);
      aug.head(load.size()) = load;
      const double lambda = solve_system(aug)[load.size()];
      const double meas = space_->mesh().cell_measure();
      for (std::size_t k = 0; k < space_->num_cells(); ++k) r[static_cast<Eigen::Index>(k * nb)] += lambda * meas;
    }
    const double n = load.norm();
    return n == 0.0 ? r.norm() : r.norm() / n;
  }

 private:
  void check_admissibility() {
    const double gi = gamma_d(Basis<Dim>::degree, params_.beta1);
    if (!(params_.beta0 > gi)) {
      warnings_.push_back("Poisson flux: beta0 = " + std::to_string(params_.beta0) +
                          " does not exceed the interior coercivity bound " + std::to_string(gi));
    }
    const double gb = 2.0 * gamma_d(Basis<Dim>::degree, 0.0);
    if (bc_.has_dirichlet() && !(params_.beta0 > gb)) {
      warnings_.push_back("Poisson flux: beta0 = " + std::to_string(params_.beta0) +
                          " does not exceed the Dirichlet-face coercivity bound " + std::to_string(gb));
    }
  }

  void assemble() {
    const auto& sp = *space_;
    const auto& mesh = sp.mesh();
    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> trip;
    trip.reserve(sp.num_cells() * nb * nb * (1 + 4 * Dim) + 2 * sp.num_cells());

    // Volume block, identical on every cell.
    Eigen::Matrix<double, nb, nb> vol = Eigen::Matrix<double, nb, nb>::Zero();
    for (const auto& node : sp.volume_nodes()) {
      for (int d = 0; d < Dim; ++d) {
        const double s2 = sp.derivative_scale(d) * sp.derivative_scale(d);
        for (int a = 0; a < nb; ++a) {
          for (int b = 0; b < nb; ++b) vol(a, b) += sp.volume_jacobian() * node.weight * s2 * node.dphi[d][a] * node.dphi[d][b];
        }
      }
    }
    for (std::size_t k = 0; k < sp.num_cells(); ++k) add_block(trip, k, k, vol);

    // Interior face blocks, identical for all faces of one direction.
    // Index 0 = minus cell, 1 = plus cell.
    std::array<std::array<std::array<Eigen::Matrix<double, nb, nb>, 2>, 2>, Dim> iface{};
    for (int d = 0; d < Dim; ++d) {
      const double h = mesh.size(d);
      const double s1 = sp.derivative_scale(d);
      const double fj = sp.face_jacobian(d);
      for (auto& row : iface[d]) {
        for (auto& m : row) m.setZero();
      }
      const auto& fm = sp.face_nodes(d, true);
      const auto& fp = sp.face_nodes(d, false);
      for (std::size_t r = 0; r < fm.size(); ++r) {
        const std::array<const typename DgSpace<Dim>::FaceNode*, 2> side{&fm[r], &fp[r]};
        const double w = fj * fm[r].weight;
        for (int s = 0; s < 2; ++s) {      // test side
          const double ss = s == 0 ? -1.0 : 1.0;
          for (int t = 0; t < 2; ++t) {    // trial side
            const double st = t == 0 ? -1.0 : 1.0;
            for (int a = 0; a < nb; ++a) {
              const double va = side[s]->phi[a];
              const double da = s1 * side[s]->dn[a];
              const double ea = s1 * s1 * side[s]->dnn[a];
              for (int b = 0; b < nb; ++b) {
                const double vb = side[t]->phi[b];
                const double db = s1 * side[t]->dn[b];
                const double eb = s1 * s1 * side[t]->dnn[b];
                double val = (params_.beta0 / h * st * vb + 0.5 * db) * ss * va + 0.5 * da * st * vb;
                if (form_ == PoissonForm::interface_correction) {
                  val += params_.beta1 * h * st * eb * ss * va;
                } else {
                  val += 0.5 * params_.beta1 * h * (st * eb * ss * va + ss * ea * st * vb);
                }
                iface[d][s][t](a, b) += w * val;
              }
            }
          }
        }
      }
    }

    // Dirichlet boundary blocks per direction and side of the domain.
    std::array<std::array<Eigen::Matrix<double, nb, nb>, 2>, Dim> bface{};
    for (int d = 0; d < Dim; ++d) {
      const double h = mesh.size(d);
      const double fj = sp.face_jacobian(d);
      for (int u = 0; u < 2; ++u) {
        const bool upper = u == 1;
        const double sn = (upper ? 1.0 : -1.0) * sp.derivative_scale(d);
        auto& m = bface[d][u];
        m.setZero();
        for (const auto& node : sp.face_nodes(d, upper)) {
          for (int a = 0; a < nb; ++a) {
            for (int b = 0; b < nb; ++b) {
              m(a, b) += fj * node.weight *
                         ((params_.beta0 / h * node.phi[b] - sn * node.dn[b]) * node.phi[a] - node.phi[b] * sn * node.dn[a]);
            }
          }
        }
      }
    }

    for (const Face& face : mesh.faces()) {
      const int d = face.direction;
      if (face.interior()) {
        const std::array<std::size_t, 2> cells{*face.minus, *face.plus};
        for (int s = 0; s < 2; ++s) {
          for (int t = 0; t < 2; ++t) add_block(trip, cells[s], cells[t], iface[d][s][t]);
        }
      } else if (bc_.kind[face.boundary_side()] == BoundaryKind::dirichlet) {
        const bool upper = !face.plus.has_value();
        const std::size_t k = face.any_cell();
        add_block(trip, k, k, bface[d][upper ? 1 : 0]);
      }
    }

    const auto n = static_cast<Eigen::Index>(num_dofs());
    matrix_.resize(n, n);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();

    if (gauge_) {
      std::vector<Triplet> aug;
      aug.reserve(trip.size() + 2 * sp.num_cells());
      aug.insert(aug.end(), trip.begin(), trip.end());
      const double meas = mesh.cell_measure();
      for (std::size_t k = 0; k < sp.num_cells(); ++k) {
        const auto i = static_cast<Eigen::Index>(k * nb);
        aug.emplace_back(i, n, meas);
        aug.emplace_back(n, i, meas);
      }
      system_.resize(n + 1, n + 1);
      system_.setFromTriplets(aug.begin(), aug.end());
    } else {
      system_ = matrix_;
    }
    system_.makeCompressed();
  }

  void add_block(std::vector<Eigen::Triplet<double>>& trip, std::size_t row_cell, std::size_t col_cell,
                 const Eigen::Matrix<double, nb, nb>& m) const {
    for (int a = 0; a < nb; ++a) {
      for (int b = 0; b < nb; ++b) {
        if (m(a, b) != 0.0) {
          trip.emplace_back(static_cast<Eigen::Index>(row_cell * nb + a), static_cast<Eigen::Index>(col_cell * nb + b),
                            m(a, b));
        }
      }
    }
  }

  Eigen::VectorXd solve_system(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = use_ldlt_ ? Eigen::VectorXd(ldlt_.solve(b)) : Eigen::VectorXd(lu_.solve(b));
    if ((use_ldlt_ ? ldlt_.info() : lu_.info()) != Eigen::Success) throw NumericalError("Poisson solve failed");
    return x;
  }

  /// Symmetric systems use LDL^T when it is accurate on a probe right-hand
  /// side; everything else uses sparse LU.
  void factorize() {
    if (form_ == PoissonForm::symmetric && !gauge_) {
      ldlt_.compute(system_);
      if (ldlt_.info() == Eigen::Success) {
        const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(system_.rows(), 1.0, 2.0);
        const Eigen::VectorXd x = ldlt_.solve(b);
        use_ldlt_ = x.allFinite() && (system_ * x - b).norm() <= 1e-10 * b.norm();
      }
      if (use_ldlt_) return;
    }
    lu_.analyzePattern(system_);
    lu_.factorize(system_);
    if (lu_.info() != Eigen::Success) {
      throw NumericalError("Poisson operator factorization failed (singular matrix?)");
    }
  }

  std::shared_ptr<const DgSpace<Dim>> space_;
  FluxParams params_;
  PoissonBC<Dim> bc_;
  PoissonForm form_;
  bool gauge_;
  SparseMatrix matrix_;
  SparseMatrix system_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  bool use_ldlt_ = false;
  std::vector<std::string> warnings_;
};

template <int Dim>
std::shared_ptr<const PoissonOperator<Dim>> assemble_operator(std::shared_ptr<const DgSpace<Dim>> space,
                                                              const FluxParams& params, const PoissonBC<Dim>& bc,
                                                              PoissonForm form = PoissonForm::symmetric,
                                                              bool zero_mean_gauge = false) {
  return std::make_shared<const PoissonOperator<Dim>>(std::move(space), params, bc, form, zero_mean_gauge);
}

template <int Dim>
Eigen::VectorXd assemble_load(const PoissonOperator<Dim>& op, const std::vector<const Field<Dim>*>& densities,
                              const LoadSpec<Dim>& load, double t) {
  return op.assemble_load(densities, load, t);
}

template <int Dim>
Field<Dim> solve_poisson(const PoissonOperator<Dim>& op, const Eigen::VectorXd& load) {
  return op.solve(load);
}

/// Largest |A - A^T| entry relative to the largest |A| entry.
inline double relative_asymmetry(const Eigen::SparseMatrix<double>& A) {
  const Eigen::MatrixXd D(A);
  const double amax = D.cwiseAbs().maxCoeff();
  return amax == 0.0 ? 0.0 : (D - D.transpose()).cwiseAbs().maxCoeff() / amax;
}

/// Smallest eigenvalue of the symmetric part of A (dense; for small test meshes).
inline double min_symmetric_eigenvalue(const Eigen::SparseMatrix<double>& A) {
  const Eigen::MatrixXd D(A);
  const Eigen::MatrixXd S = 0.5 * (D + D.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace ddgpnp
