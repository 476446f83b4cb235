#pragma once

#include <cstdint>
#include <vector>

#include "octdyn/octree.hpp"
#include "octdyn/signal.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Homogeneous Dirichlet set and signal-driven nodal loads.
struct BoundaryConditions {
  std::vector<Signal> signals;

  std::vector<DofId> fixed;  ///< sorted, unique

  struct Load {
    DofId dof = 0;
    double amplitude = 0.0;  ///< spatial amplitude [N]
    int signal = 0;          ///< index into signals
  };
  std::vector<Load> loads;  ///< sorted by dof

  /// Checks fixed/loaded disjointness and index ranges.
  void validate(std::size_t n_dof) const;

  /// R_ext(t): zeroes R and adds amplitude * signal(t) per load.
  void external_force(double t, VectorXd& R) const;

  /// Same values, but touches loaded entries only (R must be zero elsewhere).
  void update_loaded(const std::vector<double>& sig, VectorXd& R) const;

  /// Evaluates each signal once for time t (used by the SPMD workers so each
  /// owner applies identical load values).
  std::vector<double> signal_values(double t) const;
};

/// Axis-aligned box with a relative tolerance pad, used by the config layer
/// to select nodes and faces.
struct BoxRegion {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  bool contains(const Vec3& p, double pad) const {
    for (int a = 0; a < 3; ++a)
      if (p[a] < lo[a] - pad || p[a] > hi[a] + pad) return false;
    return true;
  }
};

/// Appends fixed DOFs for the selected components (bit 0/1/2 = x/y/z) of all
/// nodes inside the box.
void fix_nodes_in_box(const OctreeMesh& mesh, const BoxRegion& box, unsigned components,
                      BoundaryConditions& bcs);

/// Converts a constant traction vector [Pa] acting on the exterior boundary
/// inside `box` into consistent nodal loads (surface-element quadrature of
/// N^T t over the cell face tessellations).  Returns the loaded area.
double apply_surface_traction(const OctreeMesh& mesh, const BoxRegion& box, const Vec3& traction,
                              int signal, BoundaryConditions& bcs);

}  // namespace octdyn
