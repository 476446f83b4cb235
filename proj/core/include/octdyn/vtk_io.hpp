#pragma once

#include <string>
#include <vector>

#include "octdyn/octree.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Legacy ASCII VTK unstructured-grid export.  Octree cells become 8-corner
/// hexahedra on the corner-node subset; point data is the displacement
/// vector plus its magnitude, cell data are the material and (optionally)
/// the partition label.  Numbers are printed with 17 significant digits so
/// files round-trip bitwise.
void write_vtk(const OctreeMesh& mesh, const VectorXd& displacement,
               const std::vector<int>* part_labels, const std::string& path);

/// Reader for the writer's layout (snapshot post-processing and round-trip
/// tests).
struct VtkSnapshot {
  std::vector<Vec3> points;
  std::vector<std::array<std::uint64_t, 8>> cells;
  std::vector<Vec3> displacement;
  std::vector<int> material;
  std::vector<int> part;
  /// Corner-node ids of the originating mesh, aligned with points.
  std::vector<NodeId> node_ids;
};
VtkSnapshot read_vtk(const std::string& path);

/// Corner-node subset of a mesh in VTK point order (ascending node id).
std::vector<NodeId> corner_nodes(const OctreeMesh& mesh);

}  // namespace octdyn
