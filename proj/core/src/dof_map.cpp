#include "octdyn/dof_map.hpp"

#include <cmath>
#include <map>

#include "octdyn/transforms.hpp"

namespace octdyn {

ElementDofMap element_dof_map(const OctreeMesh& mesh, std::uint32_t cell_id) {
  if (cell_id >= mesh.cells.size()) throw Error("element_dof_map: cell id out of range");
  const OctreeCell& cell = mesh.cells[cell_id];
  if (cell.nodes.empty() || cell.canonical_id == 0)
    throw Error("element_dof_map: cell has no node numbering");

  const CellTransform& t = transforms48()[static_cast<std::size_t>(cell.transform_id - 1)];
  const unsigned cmask = canonical_mask(cell.canonical_id);

  // Doubled centered coordinates are integers in {-1,0,1}; exact matching.
  auto key_of = [](const Vec3& p) {
    return std::array<int, 3>{static_cast<int>(std::lround(2.0 * p[0])),
                              static_cast<int>(std::lround(2.0 * p[1])),
                              static_cast<int>(std::lround(2.0 * p[2]))};
  };

  const std::vector<Vec3> master_layout = cube::node_layout_centered(cmask);
  std::map<std::array<int, 3>, int> master_slot;
  for (std::size_t b = 0; b < master_layout.size(); ++b)
    master_slot.emplace(key_of(master_layout[b]), static_cast<int>(b));

  const std::vector<Vec3> cell_layout = cube::node_layout_centered(cell.edge_mask);
  if (cell_layout.size() != cell.nodes.size())
    throw Error("element_dof_map: node list inconsistent with edge mask");

  const int n = static_cast<int>(cell_layout.size());
  ElementDofMap map;
  map.dof.resize(static_cast<std::size_t>(3 * n));
  map.sign.resize(static_cast<std::size_t>(3 * n));

  for (int a = 0; a < n; ++a) {
    const auto it = master_slot.find(key_of(t.apply(cell_layout[static_cast<std::size_t>(a)])));
    if (it == master_slot.end())
      throw Error("element_dof_map: transform does not map the cell onto its master");
    const int b = it->second;
    const DofId base = 3 * static_cast<DofId>(cell.nodes[static_cast<std::size_t>(a)]);
    for (int j = 0; j < 3; ++j) {
      int col = 0, sgn = 0;
      t.row_action(j, col, sgn);
      map.dof[static_cast<std::size_t>(3 * b + j)] = base + static_cast<DofId>(col);
      map.sign[static_cast<std::size_t>(3 * b + j)] = static_cast<std::int8_t>(sgn);
    }
  }
  return map;
}

}  // namespace octdyn
