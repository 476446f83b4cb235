#pragma once

#include <cstdint>
#include <vector>

#include "octdyn/catalog.hpp"
#include "octdyn/dof_map.hpp"
#include "octdyn/octree.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Elements sharing one (canonical pattern, Poisson ratio) master, with the
/// per-element stiffness scale eta_E * eta_L relative to the unit master.
struct PatternGroup {
  int canonical_id = 0;
  std::int64_t nu_q = 0;
  const MasterCell* master = nullptr;
  std::vector<std::uint32_t> elements;  ///< ascending element ids
  std::vector<double> scale;            ///< E * L per element
};

struct ElementRef {
  std::uint32_t group = 0;
  std::uint32_t column = 0;
};

/// Per-problem constant tables of the explicit solver: pattern groups, the
/// signed DOF maps, the global diagonal mass, and the critical-step estimate.
struct SolverTables {
  const OctreeMesh* mesh = nullptr;
  std::vector<PatternGroup> groups;
  std::vector<ElementDofMap> maps;
  std::vector<ElementRef> element_ref;
  /// Flat (group-packed) layout of the per-element force columns.
  std::vector<std::uint64_t> flat_offset;  ///< per element
  std::uint64_t flat_size = 0;
  VectorXd Mdiag;
  std::size_t n_dof = 0;
  double dt_cr = 0.0;

  std::size_t n_elements() const { return maps.size(); }
};

SolverTables build_solver_tables(const OctreeMesh& mesh, const PatternCatalog& catalog);

/// Computes the per-element force columns f_e = (K_p u_e) S_e for the listed
/// elements, writing each at its offset into `flat`.  Columns are mutually
/// independent, so any element subset reproduces the serial values bitwise.
void compute_element_forces(const SolverTables& tables, const double* U,
                            const std::uint32_t* elements, const std::uint64_t* offsets,
                            std::size_t count, double* flat);

/// Pattern-grouped internal force R = sum_e K_e U_e, accumulated per DOF in
/// ascending element order (the canonical reduction order).
void internal_force(const SolverTables& tables, const VectorXd& U, VectorXd& R,
                    std::vector<double>& scratch);

}  // namespace octdyn
