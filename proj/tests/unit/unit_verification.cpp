#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "octdyn/boundary.hpp"
#include "octdyn/global_assembly.hpp"
#include "octdyn/lanczos.hpp"
#include "octdyn/signal.hpp"
#include "octdyn/verify_beam.hpp"
#include "octdyn/verify_cube.hpp"

using namespace octdyn;

TEST_CASE("analytic cube frequencies: closed-form values and degeneracies") {
  const CubeSpec spec{1000.0, 0.3, 1.0, 8.0};
  const std::vector<double> all = cube_eigenfrequencies(spec, 60);
  auto count_of = [&](double v) {
    int c = 0;
    for (const auto x : all)
      if (std::abs(x - v) < 1e-9 * v) ++c;
    return c;
  };
  const double base = 1000.0 * M_PI * M_PI / (1.0 * (1.0 - 0.09) * 64.0);

  // (1,0,0) with gamma = 1 evaluates to 13.018 rad/s, threefold by axis
  // symmetry.
  const double w100 = std::sqrt(base);
  CHECK(w100 == doctest::Approx(13.018).epsilon(1e-3));
  CHECK(count_of(w100) >= 3);

  // The spectrum starts below that: the (1,1,0) triples with the shear gamma
  // (1-nu)/2 come first.
  CHECK(all[0] == doctest::Approx(std::sqrt(base * 2.0 * 0.35)).epsilon(1e-12));
  CHECK(all[0] < w100);
  CHECK(all[0] == doctest::Approx(all[1]).epsilon(1e-14));
  CHECK(all[1] == doctest::Approx(all[2]).epsilon(1e-14));

  // A one-zero triple yields two distinct gammas: both frequencies present.
  CHECK(count_of(std::sqrt(base * 2.0)) >= 3);
  CHECK(count_of(std::sqrt(base * 2.0 * 0.35)) >= 3);
}

TEST_CASE("modal error norm") {
  const std::vector<double> ref = {1.0, 2.0, 3.0};
  CHECK(modal_error(ref, ref) == 0.0);
  std::vector<double> num = ref;
  for (auto& v : num) v *= 1.01;
  CHECK(modal_error(num, ref) == doctest::Approx(0.01).epsilon(1e-12));

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  std::vector<double> pert = ref;
  double num2 = 0, den2 = 0;
  for (std::size_t i = 0; i < pert.size(); ++i) {
    const double d = dist(rng);
    pert[i] += d;
    num2 += d * d;
    den2 += ref[i] * ref[i];
  }
  CHECK(modal_error(pert, ref) == doctest::Approx(std::sqrt(num2 / den2)).epsilon(1e-12));
  CHECK_THROWS_AS(modal_error({1.0}, ref), Error);
}

TEST_CASE("Lanczos matches a dense generalized eigensolver on a coarse cube") {
  const CubeSpec spec{1000.0, 0.3, 1.0, 8.0};
  OctreeMesh mesh = make_cube_mesh(spec, CubeMeshType::Uniform, 1);
  PatternCatalog cat;
  cat.ensure(mesh);
  const SolverTables tab = build_solver_tables(mesh, cat);

  BoundaryConditions bcs;
  for (NodeId n = 0; n < mesh.n_nodes(); ++n) {
    const Vec3& p = mesh.node_coords[n];
    for (int a = 0; a < 3; ++a)
      if (std::abs(p[a]) < 1e-9 || std::abs(p[a] - spec.L) < 1e-9)
        bcs.fixed.push_back(3 * static_cast<DofId>(n) + static_cast<DofId>(a));
  }
  std::sort(bcs.fixed.begin(), bcs.fixed.end());
  bcs.fixed.erase(std::unique(bcs.fixed.begin(), bcs.fixed.end()), bcs.fixed.end());

  const GlobalSystem sys = assemble_global(tab, bcs.fixed);
  const int count = 12;
  const std::vector<double> lz = smallest_frequencies(sys.K, diagonal_matrix(sys.Mdiag), count);

  const MatrixXd Kd = MatrixXd(sys.K);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(
      Kd, MatrixXd(sys.Mdiag.asDiagonal()), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  for (int i = 0; i < count; ++i)
    CHECK(lz[static_cast<std::size_t>(i)] ==
          doctest::Approx(std::sqrt(ges.eigenvalues()[i])).epsilon(1e-9));
}

TEST_CASE("coarse cube modal errors are small and CMM beats LMM") {
  PatternCatalog cat;
  const CubeSpec spec{1000.0, 0.3, 1.0, 8.0};
  const CubeModalCase c = cube_modal_case(spec, CubeMeshType::Uniform, 2, 30, cat);
  CHECK(c.err_lmm < 0.35);
  CHECK(c.err_cmm < 0.35);
  CHECK(c.err_cmm <= c.err_lmm);
}

TEST_CASE("rod reference: causality, static limit, self-convergence") {
  const double E = 1e4, rho = 1.0, A = 1.0, L = 16.0;
  const double c = std::sqrt(E / rho);

  // Causality: a Ricker end load must not move an interior point before the
  // wave arrives.
  const Signal ricker{SignalKind::Ricker, 0.015, 1.0, 5};
  auto force = [&](double t) { return -A * signal_eval(ricker, t); };
  auto force_dd = [&](double t) { return -A * signal_eval_ddot(ricker, t); };
  const RodReference rod(E, rho, A, L, force, force_dd, 3000.0);

  const double x_probe = 1.0;
  const double arrival = (L - x_probe) / c;
  std::vector<double> times;
  for (int i = 0; i <= 200; ++i) times.push_back(0.4 * i / 200.0);
  std::vector<std::vector<double>> u, a;
  rod.evaluate({x_probe, L}, times, u, a);

  double peak = 0.0;
  for (const auto v : u[1]) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] < arrival - 2.0 * 0.015) CHECK(std::abs(u[0][i]) <= 1e-6 * peak);

  // Static limit: constant end load F -> u(L) = F L / (E A).
  auto const_force = [](double) { return 1.0; };
  auto zero = [](double) { return 0.0; };
  const RodReference rod_static(E, rho, A, L, const_force, zero, 4000.0);
  std::vector<double> tg = {200.0 * L / c};  // long after transients average out
  // Time-average the response over one fundamental period to strip ringing.
  const double T1 = 4.0 * L / c;
  std::vector<double> avg_times;
  for (int i = 0; i < 64; ++i) avg_times.push_back(tg[0] + T1 * i / 64.0);
  std::vector<std::vector<double>> us, as;
  rod_static.evaluate({L}, avg_times, us, as);
  double mean = 0.0;
  for (const auto v : us[0]) mean += v;
  mean /= static_cast<double>(us[0].size());
  CHECK(mean == doctest::Approx(1.0 * L / (E * A)).epsilon(1e-3));

  // Self-convergence: doubling the mode count changes probes by < 0.1%.
  const RodReference rod2(E, rho, A, L, force, force_dd, 6000.0);
  std::vector<std::vector<double>> u2, a2;
  rod2.evaluate({x_probe, L}, times, u2, a2);
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    diff += (u[1][i] - u2[1][i]) * (u[1][i] - u2[1][i]);
    norm += u2[1][i] * u2[1][i];
  }
  CHECK(std::sqrt(diff / norm) < 1e-3);
}

TEST_CASE("beam case at a coarse size runs and lands near the rod reference") {
  PatternCatalog cat;
  BeamSpec spec;
  spec.duration = 0.3;
  const BeamCase coarse = beam_case(spec, 0.25, cat);
  CHECK(coarse.err_u < 0.5);
  CHECK(coarse.err_u > 0.0);
  CHECK(coarse.n_dof > 0);
}

TEST_CASE("log-log slope fit") {
  std::vector<double> n = {1e3, 8e3, 64e3};
  std::vector<double> e;
  for (const auto v : n) e.push_back(10.0 * std::pow(v, -2.0 / 3.0));
  CHECK(fit_loglog_slope(n, e) == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
}
