#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "octdyn/cube_topology.hpp"
#include "octdyn/types.hpp"
#include "octdyn/voxel.hpp"

namespace octdyn {

struct BuildCriteria {
  int max_level = 0;
  int min_level = 0;
};

/// One leaf of the balanced octree.  `anchor` is the lower corner in integer
/// lattice units of root_size / 2^coord_bits, which keeps every node
/// coordinate (corners, edge midpoints, face centers) exactly representable.
struct OctreeCell {
  std::uint8_t level = 0;
  std::array<std::int32_t, 3> anchor = {0, 0, 0};
  std::uint16_t material = 0;
  std::uint16_t edge_mask = 0;
  std::uint8_t canonical_id = 0;  ///< 1..144, set by enumerate_nodes
  std::uint8_t transform_id = 0;  ///< 1..48, maps this cell onto its master
  std::vector<NodeId> nodes;      ///< global node ids in cell-local layout order
};

class OctreeMesh {
 public:
  double root_size = 0.0;
  Vec3 origin = Vec3::Zero();
  int coord_bits = 0;  ///< lattice resolution; fixed once cells exist
  MaterialTable materials;
  std::vector<OctreeCell> cells;
  std::vector<Vec3> node_coords;
  std::vector<std::array<std::int32_t, 3>> node_icoords;
  std::vector<std::uint8_t> node_is_corner;  ///< 1 if the node is a cell corner somewhere

  bool numbered() const { return !node_coords.empty(); }
  std::size_t n_nodes() const { return node_coords.size(); }
  std::size_t n_dof() const { return 3 * node_coords.size(); }

  /// Edge length of a cell [m].
  double cell_size(const OctreeCell& c) const {
    return root_size / static_cast<double>(1u << c.level);
  }
  /// Lattice extent of a cell along one axis.
  std::int32_t cell_span(const OctreeCell& c) const {
    return std::int32_t{1} << (coord_bits - c.level);
  }
  Vec3 cell_origin(const OctreeCell& c) const {
    const double u = lattice_unit();
    return origin + u * Vec3(c.anchor[0], c.anchor[1], c.anchor[2]);
  }
  Vec3 cell_center(const OctreeCell& c) const {
    return cell_origin(c) + 0.5 * cell_size(c) * Vec3::Ones();
  }
  double lattice_unit() const { return root_size / static_cast<double>(std::int64_t{1} << coord_bits); }

  /// Index of the leaf containing the fine lattice cell `p` (each component
  /// in [0, 2^coord_bits)), or -1 when uncovered (void or outside).
  std::int64_t leaf_at(const std::array<std::int32_t, 3>& p) const;

  /// Rebuilds the internal leaf lookup table; called by the mesh operations.
  void rebuild_index();

  /// Total cell volume [m^3].
  double total_volume() const;

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

/// Builds an unbalanced octree over the voxel grid.  Leaves stop splitting
/// once materially homogeneous (and at least min_level deep) or at max_level;
/// cells containing only void are dropped.
OctreeMesh build_octree(const VoxelGrid& grid, const MaterialTable& materials,
                        const BuildCriteria& crit);

/// Analytic-primitive front end; the scene is sampled at max_level resolution
/// (voxel centers) and meshed like a voxel image.
OctreeMesh build_octree(const PrimitiveScene& scene, const MaterialTable& materials,
                        const BuildCriteria& crit);

/// Restores the 2:1 rule across faces and edges by splitting only; idempotent.
void balance_octree(OctreeMesh& mesh);

/// True when every face/edge-adjacent leaf pair differs by at most one level.
bool is_balanced(const OctreeMesh& mesh);

/// Assigns hanging-node masks, canonical pattern ids and the deduplicated
/// global node numbering.  Requires a balanced mesh.
void enumerate_nodes(OctreeMesh& mesh);

/// Uniform 2^level cubed mesh of a single material (test/verification helper).
OctreeMesh make_uniform_mesh(double root_size, const Vec3& origin, int level,
                             std::uint16_t material, const MaterialTable& materials);

/// Splits the listed cells once.  Node numbering is invalidated; callers
/// rebalance and renumber afterwards.
void refine_cells(OctreeMesh& mesh, const std::vector<std::uint32_t>& cell_ids);

namespace detail {
std::uint64_t cell_key(int level, std::int32_t i, std::int32_t j, std::int32_t k);
}

}  // namespace octdyn
