#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "octdyn/cube_topology.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// One of the 48 rotation/mirror operations of the cube, stored as a signed
/// permutation matrix together with the node/edge/face permutations it
/// induces on the reference cube.
struct CellTransform {
  /// 3x3 signed permutation, exactly one +-1 per row and column.
  std::array<std::array<int, 3>, 3> q{};
  int det = 0;
  std::array<int, cube::kNumCorners> corner_perm{};
  std::array<int, cube::kNumEdges> edge_perm{};
  std::array<int, cube::kNumFaces> face_perm{};

  Vec3 apply(const Vec3& p) const {
    Vec3 r;
    for (int i = 0; i < 3; ++i)
      r[i] = q[i][0] * p[0] + q[i][1] * p[1] + q[i][2] * p[2];
    return r;
  }

  /// Nonzero column of row i and its sign.
  void row_action(int i, int& col, int& sign) const {
    for (int j = 0; j < 3; ++j)
      if (q[i][j] != 0) {
        col = j;
        sign = q[i][j];
        return;
      }
  }
};

/// All 48 cube transformations (6 axis permutations x 8 sign choices, i.e.
/// every 3x3 matrix with exactly one +-1 per row and column).  The identity
/// is entry 0; the list and its order are fixed.
const std::vector<CellTransform>& transforms48();

/// Index of the transform equal to a.q * b.q in the transforms48() list.
int compose(int a, int b);

/// Index of the inverse transform.
int inverse(int t);

/// Image of a 12-bit edge mask: bit edge_perm[e] of the result equals bit e
/// of the input.
unsigned apply_to_mask(const CellTransform& t, unsigned mask);

/// Result of classifying an edge mask against the canonical pattern table.
struct CanonicalPattern {
  int canonical_id = 0;  ///< 1..144
  int transform_id = 0;  ///< 1..48, maps the input mask onto the canonical mask
};

/// Maps any of the 4096 edge masks to its canonical class.  The canonical
/// representative of an orbit is its smallest mask; the returned transform is
/// the lowest-index transform achieving it.
CanonicalPattern canonicalize(unsigned edge_mask);

/// Number of canonical patterns (144).
int pattern_count();

/// Canonical edge mask of a pattern id (1-based).
unsigned canonical_mask(int canonical_id);

/// Orbit size of a pattern (number of distinct masks mapping to it).
int orbit_size(int canonical_id);

}  // namespace octdyn
