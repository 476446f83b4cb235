#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "octdyn/solver_tables.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Globally assembled system reduced to the free DOFs.  Verification-only:
/// the production path never assembles K.
struct GlobalSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::SparseMatrix<double> Mcons;
  VectorXd Mdiag;
  std::vector<DofId> free_dofs;  ///< reduced index -> full dof
};

GlobalSystem assemble_global(const SolverTables& tables, const std::vector<DofId>& fixed);

/// Dense assembled stiffness on all DOFs (small meshes; EBE oracle).
MatrixXd assemble_dense_stiffness(const SolverTables& tables);

}  // namespace octdyn
