#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "octdyn/boundary.hpp"
#include "octdyn/integrator.hpp"
#include "octdyn/solver_tables.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

struct Probe {
  std::string name;
  NodeId node = 0;
};

/// Time, displacement and acceleration samples of one probe node.
/// Acceleration is the central second difference (U_next - 2 U_c + U_p)/dt^2.
struct ProbeHistory {
  std::string name;
  NodeId node = 0;
  std::vector<double> t;
  std::vector<std::array<double, 6>> rows;  ///< ux uy uz ax ay az
};

/// Displacement state carried between runs: U at steps n-1 and n.
struct StartState {
  VectorXd Up;
  VectorXd Uc;
  int step0 = 0;
  double t0 = 0.0;
};

struct TransientSetup {
  const SolverTables* tables = nullptr;
  BoundaryConditions bcs;
  TimeSettings time;
  std::vector<Probe> probes;
  int probe_cadence = 1;
  int snapshot_cadence = 0;  ///< 0 disables snapshots
  /// Driver-side snapshot sink (step, time, full displacement vector).
  std::function<void(int, double, const VectorXd&)> snapshot_sink;
};

struct TransientResult {
  std::vector<ProbeHistory> probes;
  StartState final_state;
  int steps = 0;
  double dt = 0.0;
};

/// Snaps a physical point to the closest mesh node.
NodeId nearest_node(const OctreeMesh& mesh, const Vec3& p);

/// Start-from-rest state (U0 = V0 = 0, A0 from the equation of motion at
/// t=0) plus the divergence-detector scale.  Shared by the serial and SPMD
/// drivers so both start bitwise identically.
struct InitialState {
  StartState state;
  double guard_scale = 1.0;
};
InitialState make_initial_state(const SolverTables& tables, const BoundaryConditions& bcs,
                                double dt);

/// Serial explicit driver: pattern-grouped internal force, external load,
/// central difference update and Dirichlet zeroing per step.
TransientResult run_transient(const TransientSetup& setup, const StartState* resume = nullptr);

}  // namespace octdyn
