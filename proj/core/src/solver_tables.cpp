#include "octdyn/solver_tables.hpp"

#include <map>

#include "octdyn/integrator.hpp"

namespace octdyn {

SolverTables build_solver_tables(const OctreeMesh& mesh, const PatternCatalog& catalog) {
  if (!mesh.numbered()) throw Error("build_solver_tables: mesh has no node numbering");

  SolverTables tab;
  tab.mesh = &mesh;
  tab.n_dof = mesh.n_dof();

  const std::size_t n_e = mesh.cells.size();
  tab.maps.resize(n_e);
  tab.element_ref.resize(n_e);

  std::map<std::pair<int, std::int64_t>, std::uint32_t> group_of;
  for (std::uint32_t e = 0; e < n_e; ++e) {
    const OctreeCell& c = mesh.cells[e];
    const Material& mat = mesh.materials.get(c.material);
    const auto key = std::make_pair<int, std::int64_t>(c.canonical_id,
                                                       PatternCatalog::quantize_nu(mat.nu));
    auto it = group_of.find(key);
    if (it == group_of.end()) {
      PatternGroup g;
      g.canonical_id = key.first;
      g.nu_q = key.second;
      g.master = &catalog.get(c.canonical_id, mat.nu);
      it = group_of.emplace(key, static_cast<std::uint32_t>(tab.groups.size())).first;
      tab.groups.push_back(std::move(g));
    }
    PatternGroup& g = tab.groups[it->second];
    tab.element_ref[e] = {it->second, static_cast<std::uint32_t>(g.elements.size())};
    g.elements.push_back(e);
    g.scale.push_back(mat.E * mesh.cell_size(c));

    tab.maps[e] = element_dof_map(mesh, e);
  }

  // Group-packed flat layout of the force columns.
  tab.flat_offset.resize(n_e);
  std::uint64_t base = 0;
  for (const auto& g : tab.groups) {
    const std::uint64_t ndofs = static_cast<std::uint64_t>(3 * g.master->n_nodes);
    for (std::size_t k = 0; k < g.elements.size(); ++k)
      tab.flat_offset[g.elements[k]] = base + k * ndofs;
    base += ndofs * g.elements.size();
  }
  tab.flat_size = base;

  // Global diagonal mass: scatter eta_rho * eta_L^3 * Mdiag_unit.  Signs play
  // no role (conjugating a diagonal by a signed permutation permutes it).
  tab.Mdiag = VectorXd::Zero(static_cast<Eigen::Index>(tab.n_dof));
  for (std::uint32_t e = 0; e < n_e; ++e) {
    const OctreeCell& c = mesh.cells[e];
    const Material& mat = mesh.materials.get(c.material);
    const MasterCell& master = *tab.groups[tab.element_ref[e].group].master;
    const double L = mesh.cell_size(c);
    const double m_scale = mat.rho * L * L * L;
    const ElementDofMap& map = tab.maps[e];
    for (int i = 0; i < map.size(); ++i)
      tab.Mdiag[static_cast<Eigen::Index>(map.dof[static_cast<std::size_t>(i)])] +=
          m_scale * master.Mdiag[i];
  }
  if (!(tab.Mdiag.minCoeff() > 0.0))
    throw Error("build_solver_tables: global mass has nonpositive entries");

  tab.dt_cr = critical_time_step(mesh, catalog);
  return tab;
}

void compute_element_forces(const SolverTables& tables, const double* U,
                            const std::uint32_t* elements, const std::uint64_t* offsets,
                            std::size_t count, double* flat) {
  // Aligned scratch so the small GEMV takes the same code path everywhere.
  thread_local VectorXd u_local, f_local;
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint32_t e = elements[k];
    const ElementDofMap& map = tables.maps[e];
    const ElementRef ref = tables.element_ref[e];
    const PatternGroup& g = tables.groups[ref.group];
    const int n = map.size();
    u_local.resize(n);
    f_local.resize(n);
    map.gather(U, u_local);
    f_local.noalias() = g.master->K * u_local;
    const double s = g.scale[ref.column];
    double* out = flat + offsets[k];
    for (int i = 0; i < n; ++i) out[i] = s * f_local[i];
  }
}

void internal_force(const SolverTables& tables, const VectorXd& U, VectorXd& R,
                    std::vector<double>& scratch) {
  const std::size_t n_e = tables.n_elements();
  scratch.resize(tables.flat_size);
  R.setZero(static_cast<Eigen::Index>(tables.n_dof));

  // Group-ordered compute pass (one master matrix in cache at a time)...
  std::vector<std::uint64_t> offsets;
  for (const auto& g : tables.groups) {
    offsets.resize(g.elements.size());
    for (std::size_t k = 0; k < g.elements.size(); ++k)
      offsets[k] = tables.flat_offset[g.elements[k]];
    compute_element_forces(tables, U.data(), g.elements.data(), offsets.data(),
                           g.elements.size(), scratch.data());
  }

  // ...and an ascending-element scatter pass fixing the reduction order.
  for (std::uint32_t e = 0; e < n_e; ++e) {
    const ElementDofMap& map = tables.maps[e];
    const double* f = scratch.data() + tables.flat_offset[e];
    map.scatter_add(f, R);
  }
}

}  // namespace octdyn
