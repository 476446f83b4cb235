#include <doctest.h>

#include <cmath>
#include <random>

#include "octdyn/integrator.hpp"
#include "octdyn/sbfem.hpp"

using namespace octdyn;

TEST_CASE("fictitious start-up point") {
  VectorXd U0 = VectorXd::Zero(3), V0(3), A0 = VectorXd::Zero(3);
  V0 << 1.0, 0.0, -2.0;
  const VectorXd Um1 = init_history(U0, V0, A0, 0.1);
  CHECK(Um1[0] == doctest::Approx(-0.1));
  CHECK(Um1[1] == 0.0);
  CHECK(Um1[2] == doctest::Approx(0.2));

  CHECK(init_history(U0, VectorXd::Zero(3), A0, 0.1).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937 rng(4);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXd u(5), v(5), a(5);
  for (int i = 0; i < 5; ++i) u[i] = dist(rng), v[i] = dist(rng), a[i] = dist(rng);
  const double dt = 0.02;
  const VectorXd r = init_history(u, v, a, dt);
  for (int i = 0; i < 5; ++i)
    CHECK(r[i] == doctest::Approx(u[i] - dt * v[i] + 0.5 * dt * dt * a[i]).epsilon(1e-15));

  CHECK_THROWS_AS(init_history(u, VectorXd::Zero(3), a, dt), Error);
}

TEST_CASE("single-dof oscillator tracks cos(t) and converges at second order") {
  auto oscillator_error = [](double dt) {
    // m=1, k=1, u0=1, v0=0: u(t) = cos(t).
    VectorXd Uc(1), Up(1), M(1), Rext = VectorXd::Zero(1), Rint(1);
    Uc << 1.0;
    M << 1.0;
    // A0 = -k u0 = -1
    VectorXd A0(1);
    A0 << -1.0;
    Up = init_history(Uc, VectorXd::Zero(1), A0, dt);
    double max_err = 0.0;
    const int n = static_cast<int>(std::ceil(2.0 * M_PI / dt));
    for (int s = 0; s < n; ++s) {
      Rint[0] = Uc[0];
      const VectorXd Un = cdm_step(Up, Uc, Rext, Rint, M, 0.0, dt);
      Up = Uc;
      Uc = Un;
      max_err = std::max(max_err, std::abs(Uc[0] - std::cos((s + 1) * dt)));
    }
    return max_err;
  };

  const double e1 = oscillator_error(0.01);
  CHECK(e1 < 1e-3);
  const double e2 = oscillator_error(0.005);
  // Halving dt quarters the error, within 20%.
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("zero forces and zero state stay identically zero") {
  VectorXd z = VectorXd::Zero(4), M = VectorXd::Ones(4);
  VectorXd u = z;
  VectorXd up = z;
  for (int s = 0; s < 10; ++s) {
    const VectorXd un = cdm_step(up, u, z, z, M, 0.0, 0.1);
    CHECK(un.cwiseAbs().maxCoeff() == 0.0);
    up = u;
    u = un;
  }
}

TEST_CASE("alpha = 2/dt removes the previous-step term exactly") {
  const double dt = 0.01;
  const double alpha = 2.0 / dt;
  VectorXd Up(1), Uc = VectorXd::Zero(1), R0 = VectorXd::Zero(1), M = VectorXd::Ones(1);
  Up << 123.456;
  const VectorXd a = cdm_step(Up, Uc, R0, R0, M, alpha, dt);
  Up << -7.89;
  const VectorXd b = cdm_step(Up, Uc, R0, R0, M, alpha, dt);
  CHECK(a[0] == b[0]);
  CHECK(a[0] == 0.0);
}

TEST_CASE("critical step: uniform mesh, density scaling, per-element oracle") {
  MaterialTable mats;
  mats.set(1, {1.0, 0.3, 1.0});
  PatternCatalog cat;

  OctreeMesh mesh = make_uniform_mesh(2.0, Vec3::Zero(), 1, 1, mats);
  enumerate_nodes(mesh);
  cat.ensure(mesh);

  const double dt1 = critical_time_step(mesh, cat);
  const MasterCell& mc = cat.get(mesh.cells[0].canonical_id, 0.3);
  CHECK(dt1 == doctest::Approx(1.0 * (2.0 / mc.omega_max)).epsilon(1e-14));

  // rho x4 doubles the critical step.
  MaterialTable heavy;
  heavy.set(1, {1.0, 0.3, 4.0});
  OctreeMesh mesh4 = make_uniform_mesh(2.0, Vec3::Zero(), 1, 1, heavy);
  enumerate_nodes(mesh4);
  CHECK(critical_time_step(mesh4, cat) == doctest::Approx(2.0 * dt1).epsilon(1e-12));

  // Mixed-size mesh equals the brute-force per-element generalized solve.
  OctreeMesh mixed = make_uniform_mesh(2.0, Vec3::Zero(), 1, 1, mats);
  refine_cells(mixed, {0});
  balance_octree(mixed);
  enumerate_nodes(mixed);
  cat.ensure(mixed);
  double oracle = std::numeric_limits<double>::infinity();
  for (const auto& c : mixed.cells) {
    CellGeometry geom = master_cell_geometry(c.edge_mask);
    const double L = mixed.cell_size(c);
    for (auto& p : geom.nodes) p *= L;
    const CellCoefficients coef = cell_coefficients(geom, elasticity_matrix(1.0, 0.3), 1.0);
    const RadialSolution sol = radial_eigensolve(coef);
    const MatrixXd K = stiffness(sol);
    const VectorXd d = lump_mass(consistent_mass(sol, coef.M0));
    oracle = std::min(oracle, 2.0 / element_max_frequency(K, d));
  }
  CHECK(critical_time_step(mixed, cat) == doctest::Approx(oracle).epsilon(1e-10));

  // Missing catalog entry is an error.
  PatternCatalog empty;
  CHECK_THROWS_AS(critical_time_step(mixed, empty), Error);
}

TEST_CASE("divergence guard trips on overflow and NaN") {
  DivergenceGuard guard;
  guard.set_scale(1.0);
  std::vector<double> ok = {0.0, 1.0, -5e11};
  guard.check(ok.data(), ok.size(), 3);  // no throw
  std::vector<double> big = {0.0, 2e12};
  CHECK_THROWS_AS(guard.check(big.data(), big.size(), 7), DivergenceError);
  std::vector<double> nan = {std::nan("")};
  CHECK_THROWS_AS(guard.check(nan.data(), nan.size(), 9), DivergenceError);
  try {
    guard.check(big.data(), big.size(), 7);
  } catch (const DivergenceError& e) {
    CHECK(e.step == 7);
  }
}
