#include <doctest.h>

#include <cstring>
#include <random>

#include "octdyn/boundary.hpp"
#include "octdyn/global_assembly.hpp"
#include "octdyn/solver_tables.hpp"
#include "octdyn/transient.hpp"

using namespace octdyn;

namespace {

MaterialTable mat1(double E = 1.0, double nu = 0.3, double rho = 1.0) {
  MaterialTable m;
  m.set(1, {E, nu, rho});
  return m;
}

OctreeMesh octree_demo_mesh(const MaterialTable& mats) {
  OctreeMesh mesh = make_uniform_mesh(2.0, Vec3::Zero(), 1, 1, mats);
  refine_cells(mesh, {0, 5});
  balance_octree(mesh);
  enumerate_nodes(mesh);
  return mesh;
}

}  // namespace

TEST_CASE("uniform single-material mesh forms one pattern group") {
  const MaterialTable mats = mat1();
  OctreeMesh mesh = make_uniform_mesh(1.0, Vec3::Zero(), 1, 1, mats);
  enumerate_nodes(mesh);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);
  CHECK(tab.groups.size() == 1);
  CHECK(tab.groups[0].elements.size() == 8);
  CHECK(tab.dt_cr > 0.0);
}

TEST_CASE("global mass equals density times volume per direction") {
  const MaterialTable mats = mat1(2.0, 0.3, 3.5);
  OctreeMesh mesh = octree_demo_mesh(mats);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);
  const double V = mesh.total_volume();
  for (int d = 0; d < 3; ++d) {
    double s = 0.0;
    for (Eigen::Index i = d; i < tab.Mdiag.size(); i += 3) s += tab.Mdiag[i];
    CHECK(s == doctest::Approx(3.5 * V).epsilon(1e-10));
  }
}

TEST_CASE("materials sharing nu share a master; E folds into the scale") {
  MaterialTable mats;
  mats.set(1, {1.0, 0.3, 1.0});
  mats.set(2, {4.0, 0.3, 2.0});  // same nu, different EA
  mats.set(3, {1.0, 0.0, 1.0});  // different nu

  VoxelGrid g;
  g.dims = {2, 2, 2};
  g.spacing = 1.0;
  g.labels = {1, 1, 2, 2, 3, 3, 3, 3};
  OctreeMesh mesh = build_octree(g, mats, {1, 1});
  balance_octree(mesh);
  enumerate_nodes(mesh);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);

  REQUIRE(tab.groups.size() == 2);  // nu=0.3 (ids 1,2 merged) and nu=0
  for (const auto& gr : tab.groups) {
    if (gr.nu_q == PatternCatalog::quantize_nu(0.3)) {
      CHECK(gr.elements.size() == 4);
      // scale = E * L: material 2 rows carry 4x the scale of material 1.
      double lo = 1e300, hi = 0.0;
      for (const auto s : gr.scale) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      CHECK(hi == doctest::Approx(4.0 * lo));
    } else {
      CHECK(gr.elements.size() == 4);
    }
  }
}

TEST_CASE("EBE internal force: rigid motion, dense oracle, linearity") {
  const MaterialTable mats = mat1(2.0, 0.25, 1.0);
  OctreeMesh mesh = octree_demo_mesh(mats);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);
  REQUIRE(tab.n_dof <= 5000);

  std::vector<double> scratch;
  VectorXd R(static_cast<Eigen::Index>(tab.n_dof));

  // Rigid translation -> zero force.
  VectorXd rigid = VectorXd::Zero(static_cast<Eigen::Index>(tab.n_dof));
  for (std::size_t n = 0; n < mesh.n_nodes(); ++n) rigid[3 * static_cast<Eigen::Index>(n)] = 1.0;
  internal_force(tab, rigid, R, scratch);
  const MatrixXd Kdense = assemble_dense_stiffness(tab);
  CHECK(R.cwiseAbs().maxCoeff() <= 1e-8 * Kdense.cwiseAbs().maxCoeff() * rigid.cwiseAbs().maxCoeff());

  // Dense assembly oracle on a random vector.
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXd U(static_cast<Eigen::Index>(tab.n_dof));
  for (Eigen::Index i = 0; i < U.size(); ++i) U[i] = dist(rng);
  internal_force(tab, U, R, scratch);
  const VectorXd R_oracle = Kdense * U;
  CHECK((R - R_oracle).cwiseAbs().maxCoeff() <= 1e-10 * R_oracle.cwiseAbs().maxCoeff());

  // Linearity: doubling U doubles R.
  VectorXd R2(static_cast<Eigen::Index>(tab.n_dof));
  internal_force(tab, (2.0 * U).eval(), R2, scratch);
  CHECK((R2 - 2.0 * R).cwiseAbs().maxCoeff() <= 1e-12 * R2.cwiseAbs().maxCoeff());
}

TEST_CASE("two-element mesh matches the dense oracle to 1e-10") {
  const MaterialTable mats = mat1();
  VoxelGrid g;
  g.dims = {2, 1, 1};
  g.spacing = 1.0;
  g.labels = {1, 1};
  OctreeMesh mesh = build_octree(g, mats, {1, 1});
  balance_octree(mesh);
  enumerate_nodes(mesh);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXd U(static_cast<Eigen::Index>(tab.n_dof));
  for (Eigen::Index i = 0; i < U.size(); ++i) U[i] = dist(rng);
  VectorXd R(U.size());
  std::vector<double> scratch;
  internal_force(tab, U, R, scratch);
  const VectorXd oracle = assemble_dense_stiffness(tab) * U;
  CHECK((R - oracle).cwiseAbs().maxCoeff() <= 1e-10 * oracle.cwiseAbs().maxCoeff());
}

TEST_CASE("boundary conditions: support, loads, disjointness") {
  const MaterialTable mats = mat1();
  OctreeMesh mesh = octree_demo_mesh(mats);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);

  BoundaryConditions bcs;
  bcs.signals.push_back({SignalKind::Triangle, 0.1, 2.0, 5});
  fix_nodes_in_box(mesh, {Vec3(0, 0, 0), Vec3(0, 2, 2)}, 0x7, bcs);
  CHECK_FALSE(bcs.fixed.empty());

  const double area =
      apply_surface_traction(mesh, {Vec3(2, 0, 0), Vec3(2, 2, 2)}, Vec3(3.0, 0, 0), 0, bcs);
  CHECK(area == doctest::Approx(4.0).epsilon(1e-12));

  // Load resultant equals traction times area at the signal peak.
  VectorXd R(static_cast<Eigen::Index>(tab.n_dof));
  bcs.external_force(0.1, R);
  double fx = 0.0;
  for (Eigen::Index i = 0; i < R.size(); i += 3) fx += R[i];
  CHECK(fx == doctest::Approx(3.0 * 4.0 * 2.0).epsilon(1e-12));

  // Past the signal support the load vanishes.
  bcs.external_force(0.5, R);
  CHECK(R.cwiseAbs().maxCoeff() == 0.0);

  bcs.validate(tab.n_dof);
  // A load on a fixed dof must be rejected.
  BoundaryConditions bad = bcs;
  bad.loads.push_back({bcs.fixed.front(), 1.0, 0});
  std::sort(bad.loads.begin(), bad.loads.end(),
            [](const auto& a, const auto& b) { return a.dof < b.dof; });
  CHECK_THROWS_AS(bad.validate(tab.n_dof), Error);
}

TEST_CASE("transient: zero load stays zero, fixed dofs never move") {
  const MaterialTable mats = mat1();
  OctreeMesh mesh = octree_demo_mesh(mats);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);

  TransientSetup setup;
  setup.tables = &tab;
  setup.time.duration = 50.0 * tab.dt_cr;
  setup.probes.push_back({"p", 0});
  const TransientResult res = run_transient(setup);
  for (const auto& row : res.probes[0].rows)
    for (const auto v : row) CHECK(v == 0.0);
}

TEST_CASE("chained half runs reproduce the full run bitwise") {
  const MaterialTable mats = mat1();
  OctreeMesh mesh = octree_demo_mesh(mats);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);

  TransientSetup setup;
  setup.tables = &tab;
  setup.bcs.signals.push_back({SignalKind::Ricker, 20.0 * tab.dt_cr, 1.0, 5});
  apply_surface_traction(mesh, {Vec3(2, 0, 0), Vec3(2, 2, 2)}, Vec3(-1, 0, 0), 0, setup.bcs);
  setup.probes.push_back({"p", nearest_node(mesh, Vec3(0, 1, 1))});

  const double dt = 0.95 * tab.dt_cr;
  setup.time.dt = dt;
  setup.time.duration = 80.0 * dt;
  const TransientResult full = run_transient(setup);

  setup.time.duration = 40.0 * dt;
  const TransientResult half1 = run_transient(setup);
  const TransientResult half2 = run_transient(setup, &half1.final_state);

  REQUIRE(full.final_state.Uc.size() == half2.final_state.Uc.size());
  CHECK(std::memcmp(full.final_state.Uc.data(), half2.final_state.Uc.data(),
                    sizeof(double) * static_cast<std::size_t>(full.final_state.Uc.size())) == 0);
  CHECK(std::memcmp(full.final_state.Up.data(), half2.final_state.Up.data(),
                    sizeof(double) * static_cast<std::size_t>(full.final_state.Up.size())) == 0);

  // Probe histories concatenate exactly (the seam row appears twice).
  const auto& pf = full.probes[0];
  const auto& p1 = half1.probes[0];
  const auto& p2 = half2.probes[0];
  REQUIRE(p1.rows.size() + p2.rows.size() == pf.rows.size() + 1);
  for (std::size_t r = 0; r < p1.rows.size(); ++r) CHECK(p1.rows[r] == pf.rows[r]);
  for (std::size_t r = 1; r < p2.rows.size(); ++r)
    CHECK(p2.rows[r] == pf.rows[p1.rows.size() - 1 + r]);
}

TEST_CASE("momentum stays constant after the load ends (free body, alpha=0)") {
  const MaterialTable mats = mat1();
  OctreeMesh mesh = octree_demo_mesh(mats);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);

  TransientSetup setup;
  setup.tables = &tab;
  const double dt = 0.9 * tab.dt_cr;
  setup.time.dt = dt;
  setup.bcs.signals.push_back({SignalKind::Triangle, 5.0 * dt, 1.0, 5});
  apply_surface_traction(mesh, {Vec3(2, 0, 0), Vec3(2, 2, 2)}, Vec3(-1, 0, 0), 0, setup.bcs);

  // Run past the load, capture states, then continue and compare momentum.
  setup.time.duration = 20.0 * dt;
  const TransientResult warm = run_transient(setup);
  auto momentum = [&](const StartState& s) {
    Vec3 p = Vec3::Zero();
    for (Eigen::Index i = 0; i < s.Uc.size(); ++i)
      p[i % 3] += tab.Mdiag[i] * (s.Uc[i] - s.Up[i]) / dt;
    return p;
  };
  const Vec3 p0 = momentum(warm.final_state);

  setup.time.duration = 1000.0 * dt;
  const TransientResult later = run_transient(setup, &warm.final_state);
  const Vec3 p1 = momentum(later.final_state);
  CHECK((p1 - p0).norm() <= 1e-8 * p0.norm());
}
