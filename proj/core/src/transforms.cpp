#include "octdyn/transforms.hpp"

#include <algorithm>
#include <mutex>

namespace octdyn {

namespace {

int corner_at(const Vec3& p) {
  int c = 0;
  if (p[0] > 0.0) c |= 1;
  if (p[1] > 0.0) c |= 2;
  if (p[2] > 0.0) c |= 4;
  return c;
}

CellTransform make_transform(const std::array<int, 3>& perm, const std::array<int, 3>& sign) {
  CellTransform t;
  // Row i picks component perm[i] with sign[i]: (q p)_i = sign[i] * p[perm[i]].
  for (int i = 0; i < 3; ++i) t.q[i][perm[i]] = sign[i];

  int det = sign[0] * sign[1] * sign[2];
  // Permutation parity.
  int inversions = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (perm[i] > perm[j]) ++inversions;
  if (inversions % 2 == 1) det = -det;
  t.det = det;

  for (int c = 0; c < cube::kNumCorners; ++c)
    t.corner_perm[c] = corner_at(t.apply(cube::corner_centered(c)));

  for (int e = 0; e < cube::kNumEdges; ++e) {
    const int a = t.corner_perm[cube::kEdgeCorners[e][0]];
    const int b = t.corner_perm[cube::kEdgeCorners[e][1]];
    int image = -1;
    for (int f = 0; f < cube::kNumEdges; ++f) {
      const auto& ec = cube::kEdgeCorners[f];
      if ((ec[0] == a && ec[1] == b) || (ec[0] == b && ec[1] == a)) {
        image = f;
        break;
      }
    }
    t.edge_perm[e] = image;
  }

  for (int f = 0; f < cube::kNumFaces; ++f) {
    const Vec3 c = t.apply(cube::face_center_centered(f));
    int image = -1;
    for (int g = 0; g < cube::kNumFaces; ++g)
      if ((c - cube::face_center_centered(g)).norm() < 1e-12) image = g;
    t.face_perm[f] = image;
  }
  return t;
}

struct PatternTables {
  std::vector<CellTransform> transforms;
  std::array<std::array<int, 48>, 48> compose{};
  std::array<int, 48> inverse{};
  std::vector<unsigned> canonical_masks;         // sorted, one per orbit
  std::vector<int> orbit_sizes;                  // aligned with canonical_masks
  std::array<CanonicalPattern, 4096> classify{};  // per input mask
};

PatternTables build_tables() {
  PatternTables tab;

  // Identity first, then all remaining sign/axis combinations in a fixed
  // enumeration order.
  static constexpr std::array<std::array<int, 3>, 6> kPerms = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
  }};
  for (const auto& perm : kPerms)
    for (int s = 0; s < 8; ++s) {
      const std::array<int, 3> sign = {s & 1 ? -1 : 1, s & 2 ? -1 : 1, s & 4 ? -1 : 1};
      tab.transforms.push_back(make_transform(perm, sign));
    }

  auto index_of = [&](const CellTransform& t) {
    for (int i = 0; i < 48; ++i)
      if (tab.transforms[i].q == t.q) return i;
    return -1;
  };
  for (int a = 0; a < 48; ++a)
    for (int b = 0; b < 48; ++b) {
      CellTransform ab;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            ab.q[i][j] += tab.transforms[a].q[i][k] * tab.transforms[b].q[k][j];
      tab.compose[a][b] = index_of(ab);
    }
  for (int a = 0; a < 48; ++a)
    for (int b = 0; b < 48; ++b)
      if (tab.compose[a][b] == 0) tab.inverse[a] = b;

  // Orbit classification of all 4096 masks.
  std::array<int, 4096> orbit_of;
  orbit_of.fill(-1);
  for (unsigned m = 0; m < 4096; ++m) {
    if (orbit_of[m] >= 0) continue;
    // m is the smallest unseen mask, hence the canonical representative of
    // its orbit.
    const int orbit = static_cast<int>(tab.canonical_masks.size());
    tab.canonical_masks.push_back(m);
    int size = 0;
    for (unsigned x = m; x < 4096; ++x) {
      if (orbit_of[x] >= 0) continue;
      // Find the lowest-index transform sending x to m, if any.
      for (int t = 0; t < 48; ++t) {
        if (apply_to_mask(tab.transforms[t], x) == m) {
          orbit_of[x] = orbit;
          tab.classify[x] = CanonicalPattern{orbit + 1, t + 1};
          ++size;
          break;
        }
      }
    }
    tab.orbit_sizes.push_back(size);
  }
  return tab;
}

const PatternTables& tables() {
  static const PatternTables tab = build_tables();
  return tab;
}

}  // namespace

const std::vector<CellTransform>& transforms48() { return tables().transforms; }

int compose(int a, int b) { return tables().compose[a][b]; }

int inverse(int t) { return tables().inverse[t]; }

unsigned apply_to_mask(const CellTransform& t, unsigned mask) {
  unsigned out = 0;
  for (int e = 0; e < cube::kNumEdges; ++e)
    if (mask >> e & 1u) out |= 1u << t.edge_perm[e];
  return out;
}

CanonicalPattern canonicalize(unsigned edge_mask) {
  if (edge_mask >= 4096) throw Error("edge mask out of range");
  return tables().classify[edge_mask];
}

int pattern_count() { return static_cast<int>(tables().canonical_masks.size()); }

unsigned canonical_mask(int canonical_id) {
  const auto& masks = tables().canonical_masks;
  if (canonical_id < 1 || canonical_id > static_cast<int>(masks.size()))
    throw Error("canonical id out of range");
  return masks[static_cast<std::size_t>(canonical_id - 1)];
}

int orbit_size(int canonical_id) {
  const auto& sizes = tables().orbit_sizes;
  if (canonical_id < 1 || canonical_id > static_cast<int>(sizes.size()))
    throw Error("canonical id out of range");
  return sizes[static_cast<std::size_t>(canonical_id - 1)];
}

}  // namespace octdyn
