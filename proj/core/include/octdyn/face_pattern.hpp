#pragma once

#include <array>
#include <vector>

#include "octdyn/types.hpp"

namespace octdyn {

/// One surface element of a face tessellation, referring to face-local node
/// slots: 0..3 corners (counter-clockwise), 4..7 mid-edge nodes of edges 0..3
/// (edge k runs from corner k to corner (k+1)%4), 8 the face center.
struct FaceElement {
  bool quad = false;
  std::array<int, 4> nodes = {-1, -1, -1, -1};  ///< last entry unused for triangles
  int size() const { return quad ? 4 : 3; }
};

/// Tessellates a cube face from its four half-edge flags.
///
/// An undivided face is a single quadrilateral.  As soon as one edge carries
/// a hanging node, a center node is introduced and the face becomes a fan of
/// isosceles triangles: one triangle per whole edge, two per halved edge.
/// Up to rotation this produces exactly six arrangements.
std::vector<FaceElement> face_discretization(const std::array<bool, 4>& half_edge);

/// Face-local coordinates of a node slot on the unit square [0,1]^2.
Eigen::Vector2d face_node_coord(int slot);

}  // namespace octdyn
