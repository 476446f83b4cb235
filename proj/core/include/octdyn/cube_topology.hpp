#pragma once

#include <array>
#include <cstdint>

#include "octdyn/types.hpp"

namespace octdyn {

// Fixed numbering of the reference cube used throughout the code base and in
// the mesh file format.  Corner index bits encode the axis offsets
// (bit0 = x, bit1 = y, bit2 = z):
//
//   corners:  c0 (0,0,0)  c1 (1,0,0)  c2 (0,1,0)  c3 (1,1,0)
//             c4 (0,0,1)  c5 (1,0,1)  c6 (0,1,1)  c7 (1,1,1)
//
//   edges:    0..3  along x: (0,1) (2,3) (4,5) (6,7)
//             4..7  along y: (0,2) (1,3) (4,6) (5,7)
//             8..11 along z: (0,4) (1,5) (2,6) (3,7)
//
//   faces:    0 x=0, 1 x=1, 2 y=0, 3 y=1, 4 z=0, 5 z=1
//             (corner loops are ordered so the eta x zeta normal points
//              outward, which keeps surface Jacobians positive)
namespace cube {

inline constexpr int kNumCorners = 8;
inline constexpr int kNumEdges = 12;
inline constexpr int kNumFaces = 6;

inline constexpr std::array<std::array<int, 2>, kNumEdges> kEdgeCorners = {{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // x edges
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // y edges
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // z edges
}};

/// Outward-oriented corner loop of each face.
inline constexpr std::array<std::array<int, 4>, kNumFaces> kFaceCorners = {{
    {0, 4, 6, 2},  // x = 0
    {1, 3, 7, 5},  // x = 1
    {0, 1, 5, 4},  // y = 0
    {2, 6, 7, 3},  // y = 1
    {0, 2, 3, 1},  // z = 0
    {4, 5, 7, 6},  // z = 1
}};

/// Edge between consecutive loop corners of each face (same cyclic order
/// as kFaceCorners).
inline constexpr std::array<std::array<int, 4>, kNumFaces> kFaceEdges = {{
    {8, 6, 10, 4},
    {5, 11, 7, 9},
    {0, 9, 2, 8},
    {10, 3, 11, 1},
    {4, 1, 5, 0},
    {2, 7, 3, 6},
}};

/// Corner coordinates on the unit cube [0,1]^3.
constexpr std::array<double, 3> corner_unit(int corner) {
  return {static_cast<double>(corner & 1), static_cast<double>((corner >> 1) & 1),
          static_cast<double>((corner >> 2) & 1)};
}

/// Corner coordinates centered on the scaling center, edge length 1.
inline Vec3 corner_centered(int corner) {
  const auto u = corner_unit(corner);
  return Vec3(u[0] - 0.5, u[1] - 0.5, u[2] - 0.5);
}

/// Midpoint of an edge, centered coordinates.
inline Vec3 edge_midpoint_centered(int edge) {
  return 0.5 * (corner_centered(kEdgeCorners[edge][0]) + corner_centered(kEdgeCorners[edge][1]));
}

/// Center of a face, centered coordinates.
inline Vec3 face_center_centered(int face) {
  Vec3 c = Vec3::Zero();
  for (int k = 0; k < 4; ++k) c += corner_centered(kFaceCorners[face][k]);
  return 0.25 * c;
}

/// Number of hanging (halved) edges of a face under a 12-bit edge mask.
inline int face_hanging_count(unsigned edge_mask, int face) {
  int n = 0;
  for (int k = 0; k < 4; ++k)
    if (edge_mask >> kFaceEdges[face][k] & 1u) ++n;
  return n;
}

/// A face carries a center node iff at least one of its edges is halved.
inline bool face_has_center(unsigned edge_mask, int face) {
  return face_hanging_count(edge_mask, face) > 0;
}

/// Number of element nodes implied by an edge mask:
/// 8 corners + one node per halved edge + one center per subdivided face.
int node_count(unsigned edge_mask);

/// Local node coordinates of a cell with the given edge mask, centered at the
/// scaling center, edge length 1.  Ordering: corners 0..7, then mid-edge
/// nodes by ascending edge index, then face centers by ascending face index.
std::vector<Vec3> node_layout_centered(unsigned edge_mask);

/// Local slot of the mid-edge node of `edge` (must be set in the mask).
int edge_node_slot(unsigned edge_mask, int edge);

/// Local slot of the center node of `face` (face must be subdivided).
int face_node_slot(unsigned edge_mask, int face);

}  // namespace cube
}  // namespace octdyn
