#include "octdyn/octree.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>

#include "octdyn/transforms.hpp"

namespace octdyn {

namespace {

// Face and edge neighbor offsets (corner contact is not constrained).
const std::array<std::array<int, 3>, 18>& neighbor_dirs() {
  static const std::array<std::array<int, 3>, 18> dirs = [] {
    std::array<std::array<int, 3>, 18> d{};
    int n = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int taxi = std::abs(dx) + std::abs(dy) + std::abs(dz);
          if (taxi == 1 || taxi == 2) d[static_cast<std::size_t>(n++)] = {dx, dy, dz};
        }
    return d;
  }();
  return dirs;
}

std::uint64_t pack_coord(std::int64_t x, std::int64_t y, std::int64_t z) {
  return (static_cast<std::uint64_t>(x) << 42) | (static_cast<std::uint64_t>(y) << 21) |
         static_cast<std::uint64_t>(z);
}

struct Builder {
  const VoxelGrid& grid;
  const MaterialTable& materials;
  BuildCriteria crit;
  int root_side;  // voxels per root edge, power of two
  std::vector<OctreeCell> cells;

  // Scans the voxel block covered by cell (level, i, j, k).
  struct Scan {
    bool homogeneous = true;
    bool any_nonzero = false;
    std::uint16_t label = 0;           // valid when homogeneous
    std::uint16_t majority_label = 0;  // most frequent nonzero label
  };

  Scan scan_cell(int level, std::int64_t ci, std::int64_t cj, std::int64_t ck) const {
    Scan s;
    std::int64_t x0, x1, y0, y1, z0, z1;
    if ((std::int64_t{1} << level) <= root_side) {
      const std::int64_t span = root_side >> level;
      x0 = ci * span; x1 = x0 + span;
      y0 = cj * span; y1 = y0 + span;
      z0 = ck * span; z1 = z0 + span;
    } else {
      // Sub-voxel cell: covered by a single voxel.
      const int shift = level - std::countr_zero(static_cast<unsigned>(root_side));
      x0 = ci >> shift; x1 = x0 + 1;
      y0 = cj >> shift; y1 = y0 + 1;
      z0 = ck >> shift; z1 = z0 + 1;
    }
    std::map<std::uint16_t, std::int64_t> counts;
    bool first = true;
    for (std::int64_t z = z0; z < z1; ++z)
      for (std::int64_t y = y0; y < y1; ++y)
        for (std::int64_t x = x0; x < x1; ++x) {
          const std::uint16_t v =
              grid.at(static_cast<int>(x), static_cast<int>(y), static_cast<int>(z));
          if (first) {
            s.label = v;
            first = false;
          } else if (v != s.label) {
            s.homogeneous = false;
          }
          if (v != 0) {
            s.any_nonzero = true;
            ++counts[v];
          }
        }
    if (!counts.empty()) {
      std::int64_t best = -1;
      for (const auto& [lab, cnt] : counts)
        if (cnt > best) {
          best = cnt;
          s.majority_label = lab;
        }
    }
    return s;
  }

  void recurse(int level, std::int64_t ci, std::int64_t cj, std::int64_t ck) {
    const Scan s = scan_cell(level, ci, cj, ck);
    if (!s.any_nonzero) return;  // void-only cells are dropped
    const bool stop_homog = s.homogeneous && level >= crit.min_level;
    if (stop_homog || level == crit.max_level) {
      const std::uint16_t mat = s.homogeneous ? s.label : s.majority_label;
      if (!materials.has(mat)) throw Error("voxel label " + std::to_string(mat) + " has no material");
      OctreeCell cell;
      cell.level = static_cast<std::uint8_t>(level);
      const int shift = crit.max_level + 1 - level;
      cell.anchor = {static_cast<std::int32_t>(ci << shift), static_cast<std::int32_t>(cj << shift),
                     static_cast<std::int32_t>(ck << shift)};
      cell.material = mat;
      cells.push_back(std::move(cell));
      return;
    }
    for (int o = 0; o < 8; ++o)
      recurse(level + 1, 2 * ci + (o & 1), 2 * cj + ((o >> 1) & 1), 2 * ck + ((o >> 2) & 1));
  }
};

void sort_cells(OctreeMesh& mesh) {
  std::sort(mesh.cells.begin(), mesh.cells.end(), [](const OctreeCell& a, const OctreeCell& b) {
    if (a.anchor[2] != b.anchor[2]) return a.anchor[2] < b.anchor[2];
    if (a.anchor[1] != b.anchor[1]) return a.anchor[1] < b.anchor[1];
    return a.anchor[0] < b.anchor[0];
  });
}

}  // namespace

namespace detail {
std::uint64_t cell_key(int level, std::int32_t i, std::int32_t j, std::int32_t k) {
  return (static_cast<std::uint64_t>(level) << 60) | (static_cast<std::uint64_t>(i) << 40) |
         (static_cast<std::uint64_t>(j) << 20) | static_cast<std::uint64_t>(k);
}
}  // namespace detail

std::int64_t OctreeMesh::leaf_at(const std::array<std::int32_t, 3>& p) const {
  const std::int32_t extent = std::int32_t{1} << coord_bits;
  if (p[0] < 0 || p[1] < 0 || p[2] < 0 || p[0] >= extent || p[1] >= extent || p[2] >= extent)
    return -1;
  for (int lv = coord_bits; lv >= 0; --lv) {
    const int shift = coord_bits - lv;
    const auto it = index_.find(
        detail::cell_key(lv, p[0] >> shift, p[1] >> shift, p[2] >> shift));
    if (it != index_.end()) return it->second;
  }
  return -1;
}

void OctreeMesh::rebuild_index() {
  index_.clear();
  index_.reserve(cells.size() * 2);
  for (std::uint32_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    const int shift = coord_bits - cell.level;
    index_.emplace(detail::cell_key(cell.level, cell.anchor[0] >> shift, cell.anchor[1] >> shift,
                                    cell.anchor[2] >> shift),
                   c);
  }
}

double OctreeMesh::total_volume() const {
  double v = 0.0;
  for (const auto& c : cells) {
    const double s = cell_size(c);
    v += s * s * s;
  }
  return v;
}

OctreeMesh build_octree(const VoxelGrid& grid, const MaterialTable& materials,
                        const BuildCriteria& crit) {
  grid.validate();
  if (crit.max_level < crit.min_level || crit.min_level < 0)
    throw Error("criteria violate max_level >= min_level >= 0");
  if (crit.max_level > 18) throw Error("max_level too deep");

  bool any = false;
  for (const auto v : grid.labels)
    if (v != 0) {
      any = true;
      break;
    }
  if (!any) throw Error("empty geometry: voxel grid has no nonzero labels");

  int side = 1;
  while (side < std::max({grid.dims[0], grid.dims[1], grid.dims[2]})) side <<= 1;

  Builder b{grid, materials, crit, side, {}};
  b.recurse(0, 0, 0, 0);

  OctreeMesh mesh;
  mesh.root_size = side * grid.spacing;
  mesh.origin = grid.origin;
  mesh.coord_bits = crit.max_level + 1;
  mesh.materials = materials;
  mesh.cells = std::move(b.cells);
  sort_cells(mesh);
  mesh.rebuild_index();
  return mesh;
}

OctreeMesh build_octree(const PrimitiveScene& scene, const MaterialTable& materials,
                        const BuildCriteria& crit) {
  OctreeMesh mesh = build_octree(scene.voxelize(crit.max_level), materials, crit);
  mesh.root_size = scene.root_size;
  mesh.origin = scene.origin;
  return mesh;
}

void balance_octree(OctreeMesh& mesh) {
  // Work on (level, cell-index) keys; values carry the material.
  std::unordered_map<std::uint64_t, std::uint16_t> leaves;
  leaves.reserve(mesh.cells.size() * 2);
  std::deque<std::uint64_t> queue;
  for (const auto& c : mesh.cells) {
    const int shift = mesh.coord_bits - c.level;
    const std::uint64_t key = detail::cell_key(c.level, c.anchor[0] >> shift,
                                               c.anchor[1] >> shift, c.anchor[2] >> shift);
    leaves.emplace(key, c.material);
    queue.push_back(key);
  }

  auto unpack = [](std::uint64_t key, int& l, std::int32_t& i, std::int32_t& j, std::int32_t& k) {
    l = static_cast<int>(key >> 60);
    i = static_cast<std::int32_t>((key >> 40) & 0xfffffu);
    j = static_cast<std::int32_t>((key >> 20) & 0xfffffu);
    k = static_cast<std::int32_t>(key & 0xfffffu);
  };

  auto split = [&](std::uint64_t key) {
    int l;
    std::int32_t i, j, k;
    unpack(key, l, i, j, k);
    const std::uint16_t mat = leaves.at(key);
    leaves.erase(key);
    for (int o = 0; o < 8; ++o) {
      const std::uint64_t child = detail::cell_key(l + 1, 2 * i + (o & 1), 2 * j + ((o >> 1) & 1),
                                                   2 * k + ((o >> 2) & 1));
      leaves.emplace(child, mat);
      queue.push_back(child);
    }
  };

  while (!queue.empty()) {
    const std::uint64_t key = queue.front();
    queue.pop_front();
    if (!leaves.count(key)) continue;  // split away in the meantime
    int l;
    std::int32_t i, j, k;
    unpack(key, l, i, j, k);
    const std::int32_t extent = std::int32_t{1} << l;
    for (const auto& d : neighbor_dirs()) {
      const std::int32_t ni = i + d[0], nj = j + d[1], nk = k + d[2];
      if (ni < 0 || nj < 0 || nk < 0 || ni >= extent || nj >= extent || nk >= extent) continue;
      // Find the covering leaf at or above this level and split it until the
      // level gap closes to one.
      for (;;) {
        int found_level = -1;
        std::uint64_t found_key = 0;
        for (int lv = l; lv >= 0; --lv) {
          const int shift = l - lv;
          const std::uint64_t cand = detail::cell_key(lv, ni >> shift, nj >> shift, nk >> shift);
          if (leaves.count(cand)) {
            found_level = lv;
            found_key = cand;
            break;
          }
        }
        if (found_level < 0 || found_level >= l - 1) break;
        split(found_key);
      }
    }
  }

  // Rebuild the cell list.
  std::vector<OctreeCell> out;
  out.reserve(leaves.size());
  for (const auto& [key, mat] : leaves) {
    int l;
    std::int32_t i, j, k;
    unpack(key, l, i, j, k);
    OctreeCell c;
    c.level = static_cast<std::uint8_t>(l);
    const int shift = mesh.coord_bits - l;
    c.anchor = {i << shift, j << shift, k << shift};
    c.material = mat;
    out.push_back(std::move(c));
  }
  mesh.cells = std::move(out);
  mesh.node_coords.clear();
  mesh.node_icoords.clear();
  mesh.node_is_corner.clear();
  sort_cells(mesh);
  mesh.rebuild_index();
}

bool is_balanced(const OctreeMesh& mesh) {
  // It suffices to look for coarser neighbors: a fine/coarse violation is
  // always seen from its fine side.
  for (const auto& c : mesh.cells) {
    const int l = c.level;
    const std::int32_t span = std::int32_t{1} << (mesh.coord_bits - l);
    for (const auto& d : neighbor_dirs()) {
      std::array<std::int32_t, 3> probe;
      bool inside = true;
      for (int a = 0; a < 3; ++a) {
        // A fine-lattice sample just beyond the cell in this direction.
        std::int32_t v = c.anchor[a];
        if (d[a] < 0)
          v -= 1;
        else if (d[a] > 0)
          v += span;
        else
          v += span / 2;
        probe[a] = v;
        if (v < 0 || v >= (std::int32_t{1} << mesh.coord_bits)) inside = false;
      }
      if (!inside) continue;
      const std::int64_t nb = mesh.leaf_at(probe);
      if (nb < 0) continue;
      if (l - mesh.cells[static_cast<std::size_t>(nb)].level >= 2) return false;
    }
  }
  return true;
}

void enumerate_nodes(OctreeMesh& mesh) {
  if (!is_balanced(mesh)) throw Error("enumerate_nodes requires a balanced mesh");
  mesh.rebuild_index();

  // Global corner set decides hanging nodes: an edge midpoint is a node iff
  // some finer neighbor has a corner there.
  std::unordered_map<std::uint64_t, std::uint8_t> point_flags;  // bit0: corner
  point_flags.reserve(mesh.cells.size() * 8);
  for (const auto& c : mesh.cells) {
    const std::int32_t span = mesh.cell_span(c);
    for (int corner = 0; corner < cube::kNumCorners; ++corner) {
      const std::int64_t x = c.anchor[0] + span * (corner & 1);
      const std::int64_t y = c.anchor[1] + span * ((corner >> 1) & 1);
      const std::int64_t z = c.anchor[2] + span * ((corner >> 2) & 1);
      point_flags[pack_coord(x, y, z)] |= 1;
    }
  }

  auto corner_icoord = [&](const OctreeCell& c, int corner) {
    const std::int32_t span = mesh.cell_span(c);
    return std::array<std::int32_t, 3>{c.anchor[0] + span * (corner & 1),
                                       c.anchor[1] + span * ((corner >> 1) & 1),
                                       c.anchor[2] + span * ((corner >> 2) & 1)};
  };

  // First pass: masks and pattern ids.
  for (auto& c : mesh.cells) {
    unsigned mask = 0;
    for (int e = 0; e < cube::kNumEdges; ++e) {
      const auto a = corner_icoord(c, cube::kEdgeCorners[e][0]);
      const auto b = corner_icoord(c, cube::kEdgeCorners[e][1]);
      const std::uint64_t mid =
          pack_coord((a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2);
      const auto it = point_flags.find(mid);
      if (it != point_flags.end() && (it->second & 1)) mask |= 1u << e;
    }
    c.edge_mask = static_cast<std::uint16_t>(mask);
    const CanonicalPattern p = canonicalize(mask);
    c.canonical_id = static_cast<std::uint8_t>(p.canonical_id);
    c.transform_id = static_cast<std::uint8_t>(p.transform_id);
  }

  // Second pass: per-cell node points in the cell-local layout order.
  std::vector<std::vector<std::array<std::int32_t, 3>>> cell_points(mesh.cells.size());
  std::map<std::uint64_t, NodeId> node_ids;  // ordered => deterministic numbering
  for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
    const auto& c = mesh.cells[ci];
    auto& pts = cell_points[ci];
    pts.reserve(static_cast<std::size_t>(cube::node_count(c.edge_mask)));
    for (int corner = 0; corner < cube::kNumCorners; ++corner) pts.push_back(corner_icoord(c, corner));
    for (int e = 0; e < cube::kNumEdges; ++e) {
      if (!(c.edge_mask >> e & 1u)) continue;
      const auto a = corner_icoord(c, cube::kEdgeCorners[e][0]);
      const auto b = corner_icoord(c, cube::kEdgeCorners[e][1]);
      pts.push_back({(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2});
    }
    for (int f = 0; f < cube::kNumFaces; ++f) {
      if (!cube::face_has_center(c.edge_mask, f)) continue;
      std::array<std::int64_t, 3> s = {0, 0, 0};
      for (int k = 0; k < 4; ++k) {
        const auto p = corner_icoord(c, cube::kFaceCorners[f][k]);
        for (int a = 0; a < 3; ++a) s[a] += p[a];
      }
      pts.push_back({static_cast<std::int32_t>(s[0] / 4), static_cast<std::int32_t>(s[1] / 4),
                     static_cast<std::int32_t>(s[2] / 4)});
    }
    for (const auto& p : pts) node_ids.emplace(pack_coord(p[0], p[1], p[2]), 0);
  }

  NodeId next = 0;
  for (auto& [key, id] : node_ids) id = next++;

  mesh.node_coords.resize(node_ids.size());
  mesh.node_icoords.resize(node_ids.size());
  mesh.node_is_corner.assign(node_ids.size(), 0);
  const double unit = mesh.lattice_unit();
  for (const auto& [key, id] : node_ids) {
    const std::int32_t x = static_cast<std::int32_t>(key >> 42);
    const std::int32_t y = static_cast<std::int32_t>((key >> 21) & 0x1fffffu);
    const std::int32_t z = static_cast<std::int32_t>(key & 0x1fffffu);
    mesh.node_icoords[id] = {x, y, z};
    mesh.node_coords[id] = mesh.origin + unit * Vec3(x, y, z);
    const auto it = point_flags.find(key);
    if (it != point_flags.end() && (it->second & 1)) mesh.node_is_corner[id] = 1;
  }

  for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
    auto& c = mesh.cells[ci];
    c.nodes.clear();
    c.nodes.reserve(cell_points[ci].size());
    for (const auto& p : cell_points[ci])
      c.nodes.push_back(node_ids.at(pack_coord(p[0], p[1], p[2])));
  }
}

OctreeMesh make_uniform_mesh(double root_size, const Vec3& origin, int level,
                             std::uint16_t material, const MaterialTable& materials) {
  if (!(root_size > 0.0)) throw Error("root_size must be positive");
  if (level < 0 || level > 18) throw Error("level out of range");
  OctreeMesh mesh;
  mesh.root_size = root_size;
  mesh.origin = origin;
  mesh.coord_bits = level + 1;
  mesh.materials = materials;
  const std::int32_t n = std::int32_t{1} << level;
  mesh.cells.reserve(static_cast<std::size_t>(n) * n * n);
  for (std::int32_t z = 0; z < n; ++z)
    for (std::int32_t y = 0; y < n; ++y)
      for (std::int32_t x = 0; x < n; ++x) {
        OctreeCell c;
        c.level = static_cast<std::uint8_t>(level);
        c.anchor = {x << 1, y << 1, z << 1};
        c.material = material;
        mesh.cells.push_back(std::move(c));
      }
  mesh.rebuild_index();
  return mesh;
}

void refine_cells(OctreeMesh& mesh, const std::vector<std::uint32_t>& cell_ids) {
  std::vector<std::uint8_t> split(mesh.cells.size(), 0);
  int deepest = 0;
  for (const auto id : cell_ids) {
    if (id >= mesh.cells.size()) throw Error("refine_cells: cell id out of range");
    split[id] = 1;
  }
  for (std::size_t i = 0; i < mesh.cells.size(); ++i)
    deepest = std::max(deepest, static_cast<int>(mesh.cells[i].level) + (split[i] ? 1 : 0));

  const int new_bits = std::max(mesh.coord_bits, deepest + 1);
  const int scale = new_bits - mesh.coord_bits;

  std::vector<OctreeCell> out;
  out.reserve(mesh.cells.size() + 7 * cell_ids.size());
  for (std::size_t i = 0; i < mesh.cells.size(); ++i) {
    OctreeCell c = mesh.cells[i];
    c.nodes.clear();
    c.edge_mask = 0;
    c.canonical_id = 0;
    c.transform_id = 0;
    for (int a = 0; a < 3; ++a) c.anchor[a] <<= scale;
    if (!split[i]) {
      out.push_back(std::move(c));
      continue;
    }
    const std::int32_t half = std::int32_t{1} << (new_bits - c.level - 1);
    for (int o = 0; o < 8; ++o) {
      OctreeCell child;
      child.level = static_cast<std::uint8_t>(c.level + 1);
      child.material = c.material;
      child.anchor = {c.anchor[0] + half * (o & 1), c.anchor[1] + half * ((o >> 1) & 1),
                      c.anchor[2] + half * ((o >> 2) & 1)};
      out.push_back(std::move(child));
    }
  }
  mesh.coord_bits = new_bits;
  mesh.cells = std::move(out);
  mesh.node_coords.clear();
  mesh.node_icoords.clear();
  mesh.node_is_corner.clear();
  sort_cells(mesh);
  mesh.rebuild_index();
}

}  // namespace octdyn
