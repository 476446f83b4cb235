#pragma once

#include <cstdint>
#include <vector>

#include "octdyn/octree.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Signed index map sending global DOFs into master-cell DOF order.
/// Gathering applies the cell transform Q to the nodal displacements
/// (node permutation x component rotation sign); the transposed scatter
/// applies Q^{-1} to forces.
struct ElementDofMap {
  std::vector<DofId> dof;        ///< master DOF order -> global DOF index
  std::vector<std::int8_t> sign; ///< +-1 per DOF

  int size() const { return static_cast<int>(dof.size()); }

  template <typename VecIn, typename VecOut>
  void gather(const VecIn& U, VecOut& local) const {
    for (int i = 0; i < size(); ++i)
      local[i] = sign[static_cast<std::size_t>(i)] * U[dof[static_cast<std::size_t>(i)]];
  }

  template <typename VecIn, typename VecOut>
  void scatter_add(const VecIn& local, VecOut& R) const {
    for (int i = 0; i < size(); ++i)
      R[dof[static_cast<std::size_t>(i)]] += sign[static_cast<std::size_t>(i)] * local[i];
  }
};

/// Builds the map for one cell of a numbered mesh.
ElementDofMap element_dof_map(const OctreeMesh& mesh, std::uint32_t cell_id);

}  // namespace octdyn
