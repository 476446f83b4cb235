#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "octdyn/octree.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Dual graph of a mesh: one vertex per element, one edge per face-adjacent
/// element pair, vertex coordinates at the element centroids.
struct DualGraph {
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  ///< a < b, unique, sorted
  std::vector<Vec3> coords;

  // CSR adjacency, built by build_adjacency().
  std::vector<std::uint32_t> adj_offset;
  std::vector<std::uint32_t> adj;
  void build_adjacency();
};

DualGraph dual_graph(const OctreeMesh& mesh);

/// Spectral bisection: sign of the median-thresholded Fiedler vector.
/// Disconnected graphs are handled by balancing whole components and
/// splitting the straddling one by its own Fiedler order.  Part sizes differ
/// by at most one; ties break by vertex id.
std::vector<int> spectral_bisect(const DualGraph& g);

/// Geometric bisection: median split along the longest principal axis of the
/// vertex coordinates.
std::vector<int> geometric_bisect(const DualGraph& g);

enum class PartitionMethod { Auto, Spectral, Geometric };

struct Partition {
  int n_parts = 1;
  std::vector<int> labels;                ///< part id per element
  std::vector<std::size_t> part_sizes;
  std::vector<NodeId> interface_nodes;    ///< nodes touched by >= 2 parts, sorted
  std::map<std::pair<int, int>, std::vector<NodeId>> pair_interfaces;
};

/// Recursive bisection into 2^k parts.  `Auto` picks spectral below the DOF
/// threshold and geometric above it.
Partition partition_mesh(const OctreeMesh& mesh, int n_parts,
                         PartitionMethod method = PartitionMethod::Auto,
                         double dof_threshold = 5e6);

/// Graph-level core used by partition_mesh and by 2D tests: element node
/// lists stand in for the mesh connectivity when computing interfaces.
Partition partition_graph(const DualGraph& g,
                          const std::vector<std::vector<NodeId>>& element_nodes,
                          std::size_t n_nodes, int n_parts, bool spectral);

}  // namespace octdyn
