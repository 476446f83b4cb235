#include "octdyn/global_assembly.hpp"

#include <algorithm>

namespace octdyn {

GlobalSystem assemble_global(const SolverTables& tables, const std::vector<DofId>& fixed) {
  const std::size_t n_dof = tables.n_dof;
  std::vector<std::int64_t> reduced(n_dof);
  std::vector<std::uint8_t> is_fixed(n_dof, 0);
  for (const auto d : fixed) is_fixed[d] = 1;

  GlobalSystem sys;
  std::int64_t next = 0;
  for (std::size_t d = 0; d < n_dof; ++d) {
    if (is_fixed[d]) {
      reduced[d] = -1;
    } else {
      reduced[d] = next++;
      sys.free_dofs.push_back(static_cast<DofId>(d));
    }
  }
  const auto n_free = static_cast<Eigen::Index>(next);

  std::vector<Eigen::Triplet<double>> kt, mt;
  const OctreeMesh& mesh = *tables.mesh;
  for (std::uint32_t e = 0; e < tables.n_elements(); ++e) {
    const ElementDofMap& map = tables.maps[e];
    const PatternGroup& g = tables.groups[tables.element_ref[e].group];
    const MasterCell& master = *g.master;
    const double sK = g.scale[tables.element_ref[e].column];
    const Material& mat = mesh.materials.get(mesh.cells[e].material);
    const double L = mesh.cell_size(mesh.cells[e]);
    const double sM = mat.rho * L * L * L;
    const int n = map.size();
    for (int i = 0; i < n; ++i) {
      const std::int64_t gi = reduced[map.dof[static_cast<std::size_t>(i)]];
      if (gi < 0) continue;
      for (int j = 0; j < n; ++j) {
        const std::int64_t gj = reduced[map.dof[static_cast<std::size_t>(j)]];
        if (gj < 0) continue;
        const double ss = map.sign[static_cast<std::size_t>(i)] * map.sign[static_cast<std::size_t>(j)];
        kt.emplace_back(gi, gj, ss * sK * master.K(i, j));
        mt.emplace_back(gi, gj, ss * sM * master.Mcons(i, j));
      }
    }
  }
  sys.K.resize(n_free, n_free);
  sys.K.setFromTriplets(kt.begin(), kt.end());
  sys.Mcons.resize(n_free, n_free);
  sys.Mcons.setFromTriplets(mt.begin(), mt.end());

  sys.Mdiag.resize(n_free);
  for (Eigen::Index i = 0; i < n_free; ++i)
    sys.Mdiag[i] = tables.Mdiag[static_cast<Eigen::Index>(sys.free_dofs[static_cast<std::size_t>(i)])];
  return sys;
}

MatrixXd assemble_dense_stiffness(const SolverTables& tables) {
  const auto n = static_cast<Eigen::Index>(tables.n_dof);
  MatrixXd K = MatrixXd::Zero(n, n);
  for (std::uint32_t e = 0; e < tables.n_elements(); ++e) {
    const ElementDofMap& map = tables.maps[e];
    const PatternGroup& g = tables.groups[tables.element_ref[e].group];
    const double sK = g.scale[tables.element_ref[e].column];
    const int m = map.size();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        K(static_cast<Eigen::Index>(map.dof[static_cast<std::size_t>(i)]),
          static_cast<Eigen::Index>(map.dof[static_cast<std::size_t>(j)])) +=
            map.sign[static_cast<std::size_t>(i)] * map.sign[static_cast<std::size_t>(j)] * sK *
            g.master->K(i, j);
  }
  return K;
}

}  // namespace octdyn
