#include "octdyn/transient.hpp"

#include <cmath>

namespace octdyn {

namespace {

void zero_fixed(const std::vector<DofId>& fixed, VectorXd& U) {
  for (const auto d : fixed) U[static_cast<Eigen::Index>(d)] = 0.0;
}

void record_probe_rows(const TransientSetup& setup, double t, const VectorXd& Uc,
                       const VectorXd& Up, const VectorXd& Un, double dt,
                       std::vector<ProbeHistory>& out) {
  const double inv_dt2 = 1.0 / (dt * dt);
  for (std::size_t p = 0; p < setup.probes.size(); ++p) {
    const DofId base = 3 * static_cast<DofId>(setup.probes[p].node);
    std::array<double, 6> row;
    for (int c = 0; c < 3; ++c) {
      const Eigen::Index d = static_cast<Eigen::Index>(base) + c;
      row[static_cast<std::size_t>(c)] = Uc[d];
      row[static_cast<std::size_t>(3 + c)] = (Un[d] - 2.0 * Uc[d] + Up[d]) * inv_dt2;
    }
    out[p].t.push_back(t);
    out[p].rows.push_back(row);
  }
}

}  // namespace

InitialState make_initial_state(const SolverTables& tab, const BoundaryConditions& bcs,
                                double dt) {
  const auto n_dof = static_cast<Eigen::Index>(tab.n_dof);
  InitialState init;
  init.state.Uc = VectorXd::Zero(n_dof);
  VectorXd Rext = VectorXd::Zero(n_dof);
  bcs.external_force(0.0, Rext);
  VectorXd A0 = Rext.cwiseQuotient(tab.Mdiag);
  for (const auto d : bcs.fixed) A0[static_cast<Eigen::Index>(d)] = 0.0;
  init.state.Up = init_history(init.state.Uc, VectorXd::Zero(n_dof), A0, dt);
  for (const auto d : bcs.fixed) init.state.Up[static_cast<Eigen::Index>(d)] = 0.0;
  init.state.step0 = 0;
  init.state.t0 = 0.0;
  init.guard_scale = std::max(1.0, (dt * dt) * A0.cwiseAbs().maxCoeff());
  return init;
}

NodeId nearest_node(const OctreeMesh& mesh, const Vec3& p) {
  if (mesh.n_nodes() == 0) throw Error("nearest_node: mesh has no nodes");
  NodeId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId n = 0; n < mesh.n_nodes(); ++n) {
    const double d = (mesh.node_coords[n] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = n;
    }
  }
  return best;
}

TransientResult run_transient(const TransientSetup& setup, const StartState* resume) {
  const SolverTables& tab = *setup.tables;
  const std::size_t n_dof = tab.n_dof;
  const double dt = setup.time.dt > 0.0 ? setup.time.dt : setup.time.safety * tab.dt_cr;
  if (!(dt > 0.0)) throw Error("run_transient: nonpositive time step");
  const int n_steps = static_cast<int>(std::ceil(setup.time.duration / dt - 1e-9));
  if (n_steps < 1) throw Error("run_transient: duration shorter than one step");

  setup.bcs.validate(n_dof);

  TransientResult res;
  res.dt = dt;
  res.steps = n_steps;
  res.probes.resize(setup.probes.size());
  for (std::size_t p = 0; p < setup.probes.size(); ++p) {
    res.probes[p].name = setup.probes[p].name;
    res.probes[p].node = setup.probes[p].node;
  }

  VectorXd Uc, Up;
  VectorXd Rext = VectorXd::Zero(static_cast<Eigen::Index>(n_dof));
  VectorXd Rint(static_cast<Eigen::Index>(n_dof));
  VectorXd Un(static_cast<Eigen::Index>(n_dof));
  std::vector<double> scratch;
  int step0 = 0;
  double t0 = 0.0;

  DivergenceGuard guard;

  if (resume) {
    if (resume->Uc.size() != static_cast<Eigen::Index>(n_dof)) throw Error("resume state size mismatch");
    Uc = resume->Uc;
    Up = resume->Up;
    step0 = resume->step0;
    t0 = resume->t0;
    guard.set_scale(std::max(1.0, Uc.cwiseAbs().maxCoeff()));
  } else {
    InitialState init = make_initial_state(tab, setup.bcs, dt);
    Uc = std::move(init.state.Uc);
    Up = std::move(init.state.Up);
    guard.set_scale(init.guard_scale);
  }

  for (int n = 0; n < n_steps; ++n) {
    const double t = t0 + n * dt;
    internal_force(tab, Uc, Rint, scratch);
    setup.bcs.update_loaded(setup.bcs.signal_values(t), Rext);
    cdm_update_range(Un.data(), Up.data(), Uc.data(), Rext.data(), Rint.data(),
                     tab.Mdiag.data(), setup.time.alpha, dt, 0, n_dof);
    zero_fixed(setup.bcs.fixed, Un);
    guard.check(Un.data(), n_dof, step0 + n);

    if (!setup.probes.empty() && n % setup.probe_cadence == 0)
      record_probe_rows(setup, t, Uc, Up, Un, dt, res.probes);
    if (setup.snapshot_cadence > 0 && setup.snapshot_sink && n % setup.snapshot_cadence == 0)
      setup.snapshot_sink(step0 + n, t, Uc);

    Up.swap(Uc);
    Uc.swap(Un);
  }

  // Closing probe row at t_N needs one more force evaluation for the
  // acceleration estimate; the state itself is not advanced.
  if (!setup.probes.empty()) {
    const double t = t0 + n_steps * dt;
    internal_force(tab, Uc, Rint, scratch);
    setup.bcs.update_loaded(setup.bcs.signal_values(t), Rext);
    cdm_update_range(Un.data(), Up.data(), Uc.data(), Rext.data(), Rint.data(),
                     tab.Mdiag.data(), setup.time.alpha, dt, 0, n_dof);
    zero_fixed(setup.bcs.fixed, Un);
    record_probe_rows(setup, t, Uc, Up, Un, dt, res.probes);
  }
  if (setup.snapshot_cadence > 0 && setup.snapshot_sink && n_steps % setup.snapshot_cadence == 0)
    setup.snapshot_sink(step0 + n_steps, t0 + n_steps * dt, Uc);

  res.final_state.Up = std::move(Up);
  res.final_state.Uc = std::move(Uc);
  res.final_state.step0 = step0 + n_steps;
  res.final_state.t0 = t0 + n_steps * dt;
  return res;
}

}  // namespace octdyn
