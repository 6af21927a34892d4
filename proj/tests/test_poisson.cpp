#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ddgpnp/poisson.hpp"

using namespace ddgpnp;
using std::numbers::pi;

namespace {

Eigen::VectorXd random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = U(rng);
  return v;
}

// -psi'' = pi^2 sin(pi x), psi(0) = psi(1) = 0.
double sine_error_1d(int n, PoissonForm form) {
  auto sp = make_space(build_mesh_1d(0.0, 1.0, n));
  auto op = assemble_operator<1>(sp, {8.5, 1.0 / 6.0}, PoissonBC<1>::all(BoundaryKind::dirichlet), form);
  LoadSpec<1> load;
  load.source = [](double, const Point<1>& x) { return pi * pi * std::sin(pi * x[0]); };
  const auto psi = op->solve(op->assemble_load({}, load, 0.0));
  return l1_error(psi, [](double x) { return std::sin(pi * x); });
}

// psi = sin x cos y + x + y^2/2 on [0, pi]^2: Dirichlet on x = 0, pi and Neumann on y = 0, pi.
double mixed_error_2d(int n, PoissonForm form) {
  auto sp = make_space(build_mesh_2d(pi, pi, n, n));
  PoissonBC<2> bc;
  bc.kind = {BoundaryKind::dirichlet, BoundaryKind::dirichlet, BoundaryKind::neumann, BoundaryKind::neumann};
  const auto exact = [](const Point<2>& x) { return std::sin(x[0]) * std::cos(x[1]) + x[0] + 0.5 * x[1] * x[1]; };
  bc.dirichlet = [exact](double, const Point<2>& x) { return exact(x); };
  bc.neumann = [](double, const Point<2>& x) {
    const double dy = -std::sin(x[0]) * std::sin(x[1]) + x[1];
    return x[1] < 1.0 ? -dy : dy;
  };
  auto op = assemble_operator<2>(sp, {16.0, 1.0 / 6.0}, bc, form);
  LoadSpec<2> load;
  load.source = [](double, const Point<2>& x) { return 2.0 * std::sin(x[0]) * std::cos(x[1]) - 1.0; };
  const auto psi = op->solve(op->assemble_load({}, load, 0.0));
  return l1_error(psi, exact);
}

}  // namespace

TEST(GammaD, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(gamma_d(2, 0.0), 4.0);
  EXPECT_NEAR(gamma_d(2, 1.0 / 6.0), 7.0 / 3.0, 1e-15);
  EXPECT_NEAR(gamma_d(2, 1.0 / 6.0), 4.0 * (1.0 - 0.5 + 1.0 / 12.0), 1e-15);
  for (double b1 : {0.0, 0.1, 0.5, 3.0}) EXPECT_DOUBLE_EQ(gamma_d(1, b1), 1.0);
  EXPECT_THROW(gamma_d(3, 0.1), std::invalid_argument);
}

TEST(PoissonOperator, FourCellDirichletMatrix) {
  auto sp = make_space(build_mesh_1d(0.0, 1.0, 4));
  const auto bc = PoissonBC<1>::all(BoundaryKind::dirichlet);
  // beta0 = 4 clears the interior bound 7/3 but not the Dirichlet-face bound 8.
  auto op = assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, bc);
  EXPECT_EQ(op->matrix().rows(), 12);
  EXPECT_LE(relative_asymmetry(op->matrix()), 1e-12);
  EXPECT_EQ(op->warnings().size(), 1u);
  EXPECT_LT(min_symmetric_eigenvalue(op->matrix()), 0.0);
  auto strong = assemble_operator<1>(sp, {8.5, 1.0 / 6.0}, bc);
  EXPECT_TRUE(strong->warnings().empty());
  EXPECT_GT(min_symmetric_eigenvalue(strong->matrix()), 0.0);
}

TEST(PoissonOperator, InteriorBoundGivesSemidefiniteNeumannForm) {
  // Without Dirichlet faces only the interior bound gamma_d(beta1) is in play:
  // the form is positive on everything but the constants.
  for (int n : {4, 7}) {
    auto sp = make_space(build_mesh_1d(0.0, 1.0, n));
    auto op = assemble_operator<1>(sp, {1.01 * gamma_d(2, 1.0 / 6.0), 1.0 / 6.0},
                                   PoissonBC<1>::all(BoundaryKind::neumann), PoissonForm::symmetric, true);
    const Eigen::MatrixXd D(op->matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (D + D.transpose()), Eigen::EigenvaluesOnly);
    EXPECT_NEAR(es.eigenvalues()[0], 0.0, 1e-10);
    EXPECT_GT(es.eigenvalues()[1], 1e-6);
  }
}

TEST(PoissonOperator, PositiveDefiniteAboveThresholdIn2D) {
  auto sp = make_space(build_mesh_2d(1.0, 1.0, 2, 2));
  const double b0 = 1.01 * 2.0 * gamma_d(2, 0.0);
  auto op = assemble_operator<2>(sp, {b0, 1.0 / 6.0}, PoissonBC<2>::all(BoundaryKind::dirichlet));
  EXPECT_EQ(op->matrix().rows(), 24);
  EXPECT_TRUE(op->warnings().empty());
  EXPECT_LE(relative_asymmetry(op->matrix()), 1e-12);
  EXPECT_GT(min_symmetric_eigenvalue(op->matrix()), 0.0);
}

TEST(PoissonOperator, SmallPenaltyWarnsButStaysSymmetric) {
  auto sp = make_space(build_mesh_1d(0.0, 1.0, 4));
  auto op = assemble_operator<1>(sp, {0.1, 1.0 / 6.0}, PoissonBC<1>::all(BoundaryKind::dirichlet));
  EXPECT_FALSE(op->warnings().empty());
  EXPECT_LE(relative_asymmetry(op->matrix()), 1e-12);
}

TEST(PoissonOperator, SymmetryOnRandomMeshes) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> N(2, 6);
  std::uniform_real_distribution<double> L(0.3, 4.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto sp = make_space(build_mesh_2d(L(rng), L(rng), N(rng), N(rng)));
    PoissonBC<2> bc;
    bc.kind = {BoundaryKind::dirichlet, BoundaryKind::neumann, BoundaryKind::neumann, BoundaryKind::dirichlet};
    auto op = assemble_operator<2>(sp, {16.0, 1.0 / 6.0}, bc);
    EXPECT_LE(relative_asymmetry(op->matrix()), 1e-12);
  }
}

TEST(PoissonOperator, InterfaceCorrectionFormIsUnsymmetricOnlyThroughBeta1) {
  auto sp = make_space(build_mesh_1d(0.0, 1.0, 5));
  const auto bc = PoissonBC<1>::all(BoundaryKind::dirichlet);
  auto ic = assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, bc, PoissonForm::interface_correction);
  auto sym = assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, bc, PoissonForm::symmetric);
  EXPECT_GT(relative_asymmetry(ic->matrix()), 1e-3);
  const Eigen::MatrixXd A(ic->matrix());
  const Eigen::MatrixXd S(sym->matrix());
  EXPECT_LT((0.5 * (A + A.transpose()) - S).cwiseAbs().maxCoeff(), 1e-12);
  auto ic0 = assemble_operator<1>(sp, {4.0, 0.0}, bc, PoissonForm::interface_correction);
  EXPECT_LE(relative_asymmetry(ic0->matrix()), 1e-12);
}

TEST(PoissonOperator, InterfaceCorrectionFormIsSingularAtDefaultPair) {
  // At (4, 1/6) with a Dirichlet face the unsymmetric form has an exact null
  // vector supported on the boundary cell; the symmetric form does not.
  auto sp = make_space(build_mesh_1d(0.0, 1.0, 4));
  PoissonBC<1> bc;
  bc.kind = {BoundaryKind::dirichlet, BoundaryKind::neumann};
  const auto sv = [](const Eigen::SparseMatrix<double>& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(A)};
    return svd.singularValues().minCoeff();
  };
  const FluxParams fp{4.0, 1.0 / 6.0};
  PoissonOperator<1> ic(sp, fp, bc, PoissonForm::interface_correction);
  EXPECT_LT(sv(ic.matrix()), 1e-12);
  EXPECT_GT(sv(assemble_operator<1>(sp, fp, bc, PoissonForm::symmetric)->matrix()), 0.1);
}

TEST(PoissonOperator, RefusesWithoutDirichletUnlessGauged) {
  auto sp = make_space(build_mesh_1d(0.0, 1.0, 4));
  EXPECT_THROW(assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, PoissonBC<1>::all(BoundaryKind::neumann)),
               std::invalid_argument);
  EXPECT_NO_THROW(assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, PoissonBC<1>::all(BoundaryKind::neumann),
                                       PoissonForm::symmetric, true));
}

TEST(PoissonLoad, ZeroData) {
  auto sp = make_space(build_mesh_1d(0.0, 1.0, 4));
  auto op = assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, PoissonBC<1>::all(BoundaryKind::dirichlet));
  Field<1> c(sp);
  LoadSpec<1> load;
  load.charges = {0.0};
  const auto b = op->assemble_load({&c}, load, 0.0);
  EXPECT_EQ(b.norm(), 0.0);
  const auto psi = op->solve(b);
  for (double v : psi.coefficients()) EXPECT_EQ(v, 0.0);
}

TEST(PoissonLoad, UnitDensityGivesBasisIntegrals) {
  auto sp = make_space(build_mesh_1d(0.0, 1.0, 4));
  auto op = assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, PoissonBC<1>::all(BoundaryKind::dirichlet));
  const auto c = project_l2([](double) { return 1.0; }, sp);
  LoadSpec<1> load;
  load.charges = {1.0};
  const auto b = op->assemble_load({&c}, load, 0.0);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(b[k * 3 + 0], 0.25, 1e-15);
    EXPECT_NEAR(b[k * 3 + 1], 0.0, 1e-15);
    EXPECT_NEAR(b[k * 3 + 2], 0.0, 1e-15);
  }
}

TEST(PoissonSolve, NeutralDensitiesGiveZeroPotential) {
  auto sp = make_space(build_mesh_2d(1.0, 1.0, 4, 4));
  auto op = assemble_operator<2>(sp, {16.0, 1.0 / 6.0}, PoissonBC<2>::all(BoundaryKind::dirichlet));
  const auto c1 = project_l2([](const Point<2>&) { return 2.0; }, sp);
  const auto c2 = c1;
  LoadSpec<2> load;
  load.charges = {1.0, -1.0};
  const auto psi = op->solve(op->assemble_load({&c1, &c2}, load, 0.0));
  for (double v : psi.coefficients()) EXPECT_NEAR(v, 0.0, 1e-11);
}

TEST(PoissonSolve, ResidualAndLinearity) {
  auto sp = make_space(build_mesh_1d(0.0, 1.0, 8));
  PoissonBC<1> bc;
  bc.kind = {BoundaryKind::dirichlet, BoundaryKind::neumann};
  auto op = assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, bc);
  const auto b1 = random_vector(op->num_dofs(), 1);
  const auto b2 = random_vector(op->num_dofs(), 2);
  const auto p1 = op->solve(b1);
  const auto p2 = op->solve(b2);
  EXPECT_LE(op->residual(p1, b1), 1e-10);
  const double a = 0.7, c = -1.3;
  const auto p12 = op->solve(a * b1 + c * b2);
  for (std::size_t i = 0; i < op->num_dofs(); ++i) {
    EXPECT_NEAR(p12.coefficients()[i], a * p1.coefficients()[i] + c * p2.coefficients()[i], 1e-10);
  }
}

TEST(PoissonSolve, CachedFactorizationIsReproducible) {
  auto sp = make_space(build_mesh_2d(1.0, 1.0, 5, 5));
  const auto bc = PoissonBC<2>::all(BoundaryKind::dirichlet);
  auto op = assemble_operator<2>(sp, {16.0, 1.0 / 6.0}, bc);
  for (unsigned s = 0; s < 100; ++s) {
    const auto b = random_vector(op->num_dofs(), 100 + s);
    const auto cached = op->solve(b);
    if (s % 25 == 0) {
      auto fresh = assemble_operator<2>(sp, {16.0, 1.0 / 6.0}, bc);
      EXPECT_EQ(fresh->solve(b).coefficients(), cached.coefficients());
    }
    EXPECT_EQ(op->solve(b).coefficients(), cached.coefficients());
  }
}

TEST(PoissonSolve, ManufacturedSineConvergesAtThirdOrder) {
  for (auto form : {PoissonForm::symmetric, PoissonForm::interface_correction}) {
    const double e10 = sine_error_1d(10, form);
    const double e20 = sine_error_1d(20, form);
    const double e40 = sine_error_1d(40, form);
    EXPECT_LT(e40, 1e-5);
    EXPECT_GE(std::log2(e10 / e20), 2.8) << to_string(form);
    EXPECT_GE(std::log2(e20 / e40), 2.8) << to_string(form);
    EXPECT_GE(std::log2(e10 / e40) / 2.0, 2.8) << to_string(form);
  }
}

TEST(PoissonSolve, ManufacturedMixedBoundaryIn2D) {
  for (auto form : {PoissonForm::symmetric, PoissonForm::interface_correction}) {
    const double e8 = mixed_error_2d(8, form);
    const double e16 = mixed_error_2d(16, form);
    EXPECT_GE(std::log2(e8 / e16), 2.8) << to_string(form);
  }
}

TEST(PoissonSolve, GaugedNeumannProblem) {
  // -psi'' = pi^2 cos(pi x), psi'(0) = psi'(1) = 0, zero mean.
  double prev = 0.0;
  for (int n : {10, 20}) {
    auto sp = make_space(build_mesh_1d(0.0, 1.0, n));
    auto op = assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, PoissonBC<1>::all(BoundaryKind::neumann),
                                   PoissonForm::symmetric, true);
    LoadSpec<1> load;
    load.source = [](double, const Point<1>& x) { return pi * pi * std::cos(pi * x[0]); };
    const auto b = op->assemble_load({}, load, 0.0);
    const auto psi = op->solve(b);
    EXPECT_NEAR(integral(psi), 0.0, 1e-13);
    EXPECT_LE(op->residual(psi, b), 1e-10);
    const double e = l1_error(psi, [](double x) { return std::cos(pi * x); });
    if (prev > 0.0) {
      EXPECT_GE(std::log2(prev / e), 2.8);
    }
    prev = e;
  }
}

TEST(PoissonSolve, StabilityConstantIsStableUnderHalving) {
  auto sp = make_space(build_mesh_1d(0.0, 1.0, 16));
  auto op = assemble_operator<1>(sp, {4.0, 1.0 / 6.0}, PoissonBC<1>::all(BoundaryKind::dirichlet));
  LoadSpec<1> load;
  load.charges = {1.0};
  const auto c = project_l2([](double x) { return 1.0 + x; }, sp);
  const auto psi0 = op->solve(op->assemble_load({&c}, load, 0.0));
  auto l2 = [](const Field<1>& u) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.num_cells(); ++k) {
      for (int a = 0; a < 3; ++a) s += u.mesh().cell_measure() * 0.5 * basis_norm_squared<1>(a) * u.cell(k)[a] * u.cell(k)[a];
    }
    return std::sqrt(s);
  };
  double ratio_prev = -1.0;
  for (double delta : {1e-2, 5e-3, 2.5e-3}) {
    auto cp = c;
    const auto pert = project_l2([delta](double x) { return delta * std::sin(7 * x); }, sp);
    cp += pert;
    const auto psi1 = op->solve(op->assemble_load({&cp}, load, 0.0));
    auto diff = psi1;
    diff.axpby(1.0, -1.0, psi0);
    const double ratio = l2(diff) / l2(pert);
    if (ratio_prev > 0.0) {
      EXPECT_NEAR(ratio, ratio_prev, 1e-8 * ratio_prev);
    }
    ratio_prev = ratio;
  }
  EXPECT_LT(ratio_prev, 1.0);
}
