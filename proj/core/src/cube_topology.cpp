#include "octdyn/cube_topology.hpp"

#include <bit>

namespace octdyn {
namespace cube {

int node_count(unsigned edge_mask) {
  int n = kNumCorners + std::popcount(edge_mask & 0xfffu);
  for (int f = 0; f < kNumFaces; ++f)
    if (face_has_center(edge_mask, f)) ++n;
  return n;
}

std::vector<Vec3> node_layout_centered(unsigned edge_mask) {
  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>(node_count(edge_mask)));
  for (int c = 0; c < kNumCorners; ++c) nodes.push_back(corner_centered(c));
  for (int e = 0; e < kNumEdges; ++e)
    if (edge_mask >> e & 1u) nodes.push_back(edge_midpoint_centered(e));
  for (int f = 0; f < kNumFaces; ++f)
    if (face_has_center(edge_mask, f)) nodes.push_back(face_center_centered(f));
  return nodes;
}

int edge_node_slot(unsigned edge_mask, int edge) {
  if (!(edge_mask >> edge & 1u)) throw Error("edge carries no hanging node");
  return kNumCorners + std::popcount(edge_mask & ((1u << edge) - 1u));
}

int face_node_slot(unsigned edge_mask, int face) {
  if (!face_has_center(edge_mask, face)) throw Error("face carries no center node");
  int slot = kNumCorners + std::popcount(edge_mask & 0xfffu);
  for (int f = 0; f < face; ++f)
    if (face_has_center(edge_mask, f)) ++slot;
  return slot;
}

}  // namespace cube
}  // namespace octdyn
