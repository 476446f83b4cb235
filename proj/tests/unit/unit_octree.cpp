#include <doctest.h>

#include <bit>
#include <random>
#include <set>

#include "octdyn/cube_topology.hpp"
#include "octdyn/octree.hpp"

using namespace octdyn;

namespace {

MaterialTable two_materials() {
  MaterialTable m;
  m.set(1, {1.0, 0.0, 1.0});
  m.set(2, {2.0, 0.3, 1.0});
  return m;
}

VoxelGrid cube_grid(int n, std::uint16_t label) {
  VoxelGrid g;
  g.dims = {n, n, n};
  g.spacing = 1.0;
  g.labels.assign(static_cast<std::size_t>(n) * n * n, label);
  return g;
}

// Exhaustive adjacency oracle: closed lattice boxes touch over a face (two
// positive overlaps) or an edge (one positive overlap).
bool oracle_balanced(const OctreeMesh& mesh) {
  for (std::size_t a = 0; a < mesh.cells.size(); ++a)
    for (std::size_t b = a + 1; b < mesh.cells.size(); ++b) {
      const auto& ca = mesh.cells[a];
      const auto& cb = mesh.cells[b];
      int positive = 0, touching = 0;
      for (int ax = 0; ax < 3; ++ax) {
        const std::int64_t alo = ca.anchor[ax], ahi = alo + mesh.cell_span(ca);
        const std::int64_t blo = cb.anchor[ax], bhi = blo + mesh.cell_span(cb);
        const std::int64_t lo = std::max(alo, blo), hi = std::min(ahi, bhi);
        if (hi > lo)
          ++positive;
        else if (hi == lo)
          ++touching;
        else
          positive = -100;  // disjoint
      }
      const bool face = positive == 2 && touching == 1;
      const bool edge = positive == 1 && touching == 2;
      if ((face || edge) && std::abs(int(ca.level) - int(cb.level)) > 1) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("homogeneous region never splits") {
  const OctreeMesh mesh = build_octree(cube_grid(8, 1), two_materials(), {3, 0});
  CHECK(mesh.cells.size() == 1);
  CHECK(mesh.cells[0].level == 0);
  CHECK(mesh.root_size == doctest::Approx(8.0));
}

TEST_CASE("planar material interface resolves with one bisection") {
  VoxelGrid g = cube_grid(8, 1);
  for (int z = 0; z < 8; ++z)
    for (int y = 0; y < 8; ++y)
      for (int x = 4; x < 8; ++x)
        g.labels[static_cast<std::size_t>(x) + 8 * (static_cast<std::size_t>(y) + 8 * z)] = 2;
  const OctreeMesh mesh = build_octree(g, two_materials(), {1, 0});
  CHECK(mesh.cells.size() == 8);
  int m1 = 0, m2 = 0;
  for (const auto& c : mesh.cells) {
    CHECK(c.level == 1);
    (c.material == 1 ? m1 : m2)++;
  }
  CHECK(m1 == 4);
  CHECK(m2 == 4);
}

TEST_CASE("empty geometry and bad criteria are rejected") {
  CHECK_THROWS_AS(build_octree(cube_grid(4, 0), two_materials(), {2, 0}), Error);
  CHECK_THROWS_AS(build_octree(cube_grid(4, 1), two_materials(), {1, 2}), Error);
}

TEST_CASE("sphere cell count matches a voxelize-then-merge oracle") {
  PrimitiveScene scene;
  scene.root_size = 1.0;
  scene.items.push_back(SpherePrimitive{Vec3(0.5, 0.5, 0.5), 0.4, 1});
  const int max_level = 3;
  const OctreeMesh mesh = build_octree(scene, two_materials(), {max_level, 0});

  // Independent scan-line voxelization at the finest resolution, then a
  // bottom-up merge of fully homogeneous octants.
  const int n = 1 << max_level;
  std::vector<std::uint16_t> vox(static_cast<std::size_t>(n) * n * n, 0);
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const Vec3 c((x + 0.5) / n, (y + 0.5) / n, (z + 0.5) / n);
        if ((c - Vec3(0.5, 0.5, 0.5)).norm() <= 0.4)
          vox[static_cast<std::size_t>(x) +
              static_cast<std::size_t>(n) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(n) * z)] = 1;
      }
  // merge recursively: returns cell count of the subtree (0 for void).
  auto count = [&](auto&& self, int level, int x0, int y0, int z0) -> std::size_t {
    const int span = n >> level;
    bool any = false, homog = true;
    const std::uint16_t first = vox[static_cast<std::size_t>(x0) +
                                    static_cast<std::size_t>(n) *
                                        (static_cast<std::size_t>(y0) + static_cast<std::size_t>(n) * z0)];
    for (int z = z0; z < z0 + span; ++z)
      for (int y = y0; y < y0 + span; ++y)
        for (int x = x0; x < x0 + span; ++x) {
          const std::uint16_t v = vox[static_cast<std::size_t>(x) +
                                      static_cast<std::size_t>(n) *
                                          (static_cast<std::size_t>(y) + static_cast<std::size_t>(n) * z)];
          if (v != first) homog = false;
          if (v != 0) any = true;
        }
    if (!any) return 0;
    if (homog) return 1;
    std::size_t total = 0;
    const int h = span / 2;
    for (int o = 0; o < 8; ++o)
      total += self(self, level + 1, x0 + (o & 1) * h, y0 + ((o >> 1) & 1) * h,
                    z0 + ((o >> 2) & 1) * h);
    return total;
  };
  CHECK(mesh.cells.size() == count(count, 0, 0, 0, 0));
}

TEST_CASE("balancing is idempotent on balanced meshes") {
  OctreeMesh mesh = make_uniform_mesh(1.0, Vec3::Zero(), 1, 1, two_materials());
  const std::size_t before = mesh.cells.size();
  balance_octree(mesh);
  CHECK(mesh.cells.size() == before);
  CHECK(is_balanced(mesh));
}

TEST_CASE("a coarse cell next to two-level-finer cells splits exactly once") {
  // Two level-1 cells; refine one twice to level 3 in the corner touching the
  // other.
  VoxelGrid g;
  g.dims = {2, 1, 1};
  g.spacing = 1.0;
  g.labels = {1, 1};
  OctreeMesh mesh = build_octree(g, two_materials(), {1, 1});
  REQUIRE(mesh.cells.size() == 2);

  // refine the right cell, then its child adjacent to the left cell
  refine_cells(mesh, {1});
  std::vector<std::uint32_t> next;
  for (std::uint32_t e = 0; e < mesh.cells.size(); ++e)
    if (mesh.cells[e].level == 2 && mesh.cells[e].anchor[0] == 4 && mesh.cells[e].anchor[1] == 0 &&
        mesh.cells[e].anchor[2] == 0)
      next.push_back(e);
  REQUIRE(next.size() == 1);
  refine_cells(mesh, next);
  CHECK_FALSE(is_balanced(mesh));

  balance_octree(mesh);
  CHECK(is_balanced(mesh));
  CHECK(oracle_balanced(mesh));
  // The level-1 neighbor must have split once (level 2 children now present
  // on the left half).
  for (const auto& c : mesh.cells)
    if (c.anchor[0] < 4) CHECK(c.level >= 2);
}

TEST_CASE("random refinement rebalances against the all-pairs oracle") {
  std::mt19937 rng(7);
  OctreeMesh mesh = make_uniform_mesh(1.0, Vec3::Zero(), 1, 1, two_materials());
  for (int round = 0; round < 3; ++round) {
    std::vector<std::uint32_t> refine;
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(mesh.cells.size() - 1));
    std::set<std::uint32_t> chosen;
    for (int k = 0; k < 5; ++k) chosen.insert(pick(rng));
    refine.assign(chosen.begin(), chosen.end());
    refine_cells(mesh, refine);
  }
  balance_octree(mesh);
  CHECK(is_balanced(mesh));
  CHECK(oracle_balanced(mesh));
  // Only splits: idempotence on a second pass.
  const std::size_t n = mesh.cells.size();
  balance_octree(mesh);
  CHECK(mesh.cells.size() == n);
}

TEST_CASE("two equal adjacent cubes carry 12 nodes and empty masks") {
  VoxelGrid g;
  g.dims = {2, 1, 1};
  g.spacing = 1.0;
  g.labels = {1, 1};
  OctreeMesh mesh = build_octree(g, two_materials(), {1, 1});
  balance_octree(mesh);
  enumerate_nodes(mesh);
  REQUIRE(mesh.cells.size() == 2);
  CHECK(mesh.n_nodes() == 12);
  for (const auto& c : mesh.cells) {
    CHECK(c.edge_mask == 0);
    CHECK(c.nodes.size() == 8);
    CHECK(c.canonical_id == 1);
  }
}

TEST_CASE("uniform 2x2x2 mesh has 27 nodes and no hanging nodes") {
  OctreeMesh mesh = make_uniform_mesh(1.0, Vec3::Zero(), 1, 1, two_materials());
  enumerate_nodes(mesh);
  CHECK(mesh.n_nodes() == 27);
  for (const auto& c : mesh.cells) CHECK(c.edge_mask == 0);
  for (NodeId n = 0; n < 27; ++n) CHECK(mesh.node_is_corner[n] == 1);
}

TEST_CASE("a coarse cube facing four finer cubes gains a face-center node") {
  VoxelGrid g;
  g.dims = {2, 1, 1};
  g.spacing = 1.0;
  g.labels = {1, 1};
  OctreeMesh mesh = build_octree(g, two_materials(), {1, 1});
  refine_cells(mesh, {1});
  balance_octree(mesh);
  enumerate_nodes(mesh);
  REQUIRE(mesh.cells.size() == 9);

  const OctreeCell* big = nullptr;
  for (const auto& c : mesh.cells)
    if (c.level == 1) big = &c;
  REQUIRE(big != nullptr);

  // The shared face x = 1 has all four edges halved.
  int nh = cube::face_hanging_count(big->edge_mask, 1);
  CHECK(nh == 4);
  CHECK(cube::face_has_center(big->edge_mask, 1));
  CHECK(std::popcount(static_cast<unsigned>(big->edge_mask)) == 4);
  // 8 corners + 4 mid-edge nodes + 5 face centers: the shared face has
  // n_h = 4 and each lateral face sees one halved edge (n_h = 1), which also
  // adds a center under the fan rule.
  CHECK(big->nodes.size() == 17);
  for (int f = 2; f < 6; ++f) CHECK(cube::face_hanging_count(big->edge_mask, f) == 1);

  // Unbalanced input is rejected: refine twice toward a level-1 neighbor.
  OctreeMesh broken = make_uniform_mesh(1.0, Vec3::Zero(), 1, 1, two_materials());
  refine_cells(broken, {0});
  std::vector<std::uint32_t> corner_child;
  for (std::uint32_t e = 0; e < broken.cells.size(); ++e)
    if (broken.cells[e].level == 2 && broken.cells[e].anchor == std::array<std::int32_t, 3>{2, 2, 2})
      corner_child.push_back(e);
  REQUIRE(corner_child.size() == 1);
  refine_cells(broken, corner_child);
  CHECK_FALSE(is_balanced(broken));
  CHECK_THROWS_AS(enumerate_nodes(broken), Error);
}

TEST_CASE("volume is conserved for voxel input resolved at max level") {
  PrimitiveScene scene;
  scene.root_size = 1.0;
  scene.items.push_back(SpherePrimitive{Vec3(0.5, 0.5, 0.5), 0.4, 1});
  OctreeMesh mesh = build_octree(scene, two_materials(), {3, 0});
  const VoxelGrid g = scene.voxelize(3);
  std::size_t filled = 0;
  for (const auto v : g.labels)
    if (v != 0) ++filled;
  const double voxel_volume = g.spacing * g.spacing * g.spacing;
  CHECK(mesh.total_volume() == doctest::Approx(filled * voxel_volume).epsilon(1e-12));

  balance_octree(mesh);
  CHECK(mesh.total_volume() == doctest::Approx(filled * voxel_volume).epsilon(1e-12));
}

TEST_CASE("nodes are globally deduplicated with exact lattice coordinates") {
  OctreeMesh mesh = make_uniform_mesh(2.0, Vec3::Zero(), 2, 1, two_materials());
  refine_cells(mesh, {0, 7});
  balance_octree(mesh);
  enumerate_nodes(mesh);
  std::set<std::array<std::int32_t, 3>> unique(mesh.node_icoords.begin(),
                                               mesh.node_icoords.end());
  CHECK(unique.size() == mesh.n_nodes());
  // Mask invariant: canonical id and transform reproduce the mask.
  for (const auto& c : mesh.cells) {
    CHECK(c.canonical_id >= 1);
    CHECK(c.canonical_id <= 144);
    CHECK(c.nodes.size() == static_cast<std::size_t>(cube::node_count(c.edge_mask)));
  }
}
