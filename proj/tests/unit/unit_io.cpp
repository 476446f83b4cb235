#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "octdyn/csv_io.hpp"
#include "octdyn/mesh_file.hpp"
#include "octdyn/run_config.hpp"
#include "octdyn/vtk_io.hpp"

using namespace octdyn;

namespace {

MaterialTable mats2() {
  MaterialTable m;
  m.set(1, {1.0, 0.25, 1.0});
  m.set(2, {3.0, 0.25, 2.0});
  return m;
}

OctreeMesh demo_mesh() {
  VoxelGrid g;
  g.dims = {2, 2, 1};
  g.spacing = 0.5;
  g.labels = {1, 1, 2, 2};
  OctreeMesh mesh = build_octree(g, mats2(), {2, 1});
  refine_cells(mesh, {0});
  balance_octree(mesh);
  enumerate_nodes(mesh);
  return mesh;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("mesh file: write -> read -> write is byte identical") {
  const OctreeMesh mesh = demo_mesh();
  write_mesh(mesh, "m1.octm");
  const OctreeMesh loaded = read_mesh("m1.octm");
  write_mesh(loaded, "m2.octm");
  CHECK(slurp("m1.octm") == slurp("m2.octm"));

  // Structure survives.
  CHECK(loaded.cells.size() == mesh.cells.size());
  CHECK(loaded.n_nodes() == mesh.n_nodes());
  CHECK(loaded.root_size == mesh.root_size);
  for (std::size_t e = 0; e < mesh.cells.size(); ++e) {
    CHECK(loaded.cells[e].edge_mask == mesh.cells[e].edge_mask);
    CHECK(loaded.cells[e].nodes == mesh.cells[e].nodes);
    CHECK(loaded.cells[e].anchor == mesh.cells[e].anchor);
  }
  CHECK(loaded.materials.get(2).E == 3.0);
  std::remove("m1.octm");
  std::remove("m2.octm");
}

TEST_CASE("vtk export: single cell, zero field, part labels round trip") {
  MaterialTable m = mats2();
  OctreeMesh mesh = make_uniform_mesh(1.0, Vec3::Zero(), 0, 1, m);
  enumerate_nodes(mesh);
  const VectorXd zero = VectorXd::Zero(static_cast<Eigen::Index>(mesh.n_dof()));
  write_vtk(mesh, zero, nullptr, "one.vtk");
  const VtkSnapshot snap = read_vtk("one.vtk");
  CHECK(snap.points.size() == 8);
  CHECK(snap.cells.size() == 1);
  for (const auto& d : snap.displacement) CHECK(d.norm() == 0.0);
  std::remove("one.vtk");

  // Partition labels round-trip through the cell data.
  OctreeMesh mesh8 = make_uniform_mesh(1.0, Vec3::Zero(), 1, 1, m);
  enumerate_nodes(mesh8);
  std::vector<int> labels = {0, 1, 0, 1, 1, 0, 1, 0};
  write_vtk(mesh8, VectorXd::Zero(static_cast<Eigen::Index>(mesh8.n_dof())), &labels, "p.vtk");
  const VtkSnapshot snap8 = read_vtk("p.vtk");
  CHECK(snap8.part == labels);
  CHECK(snap8.material == std::vector<int>(8, 1));
  std::remove("p.vtk");

  // Hanging-node mesh: only corner nodes are exported.
  const OctreeMesh hm = demo_mesh();
  write_vtk(hm, VectorXd::Zero(static_cast<Eigen::Index>(hm.n_dof())), nullptr, "h.vtk");
  const VtkSnapshot hs = read_vtk("h.vtk");
  CHECK(hs.points.size() == corner_nodes(hm).size());
  CHECK(hs.points.size() < hm.n_nodes());
  std::remove("h.vtk");
}

TEST_CASE("probe csv: 17-digit round trip") {
  ProbeHistory p;
  p.name = "tip";
  p.node = 42;
  p.t = {0.0, 1.0 / 3.0, 2e-17};
  p.rows = {{0, 0, 0, 0, 0, 0},
            {1.0 / 7.0, -2.5e-300, 3.0, -4.0, 5.5, 6.25},
            {1e300, -1e-300, 0.1, 0.2, 0.3, 0.4}};
  write_probe_csv(p, "probe.csv");
  const ProbeHistory q = read_probe_csv("probe.csv");
  REQUIRE(q.t.size() == p.t.size());
  for (std::size_t r = 0; r < p.t.size(); ++r) {
    CHECK(q.t[r] == p.t[r]);
    for (int c = 0; c < 6; ++c)
      CHECK(q.rows[r][static_cast<std::size_t>(c)] == p.rows[r][static_cast<std::size_t>(c)]);
  }
  // Write -> read -> write reproduces the bytes.
  write_probe_csv(q, "probe2.csv");
  ProbeHistory q2 = read_probe_csv("probe2.csv");
  q2.name = p.name;
  q2.node = p.node;
  write_probe_csv(q2, "probe3.csv");
  CHECK(slurp("probe2.csv").substr(slurp("probe2.csv").find('\n')) ==
        slurp("probe3.csv").substr(slurp("probe3.csv").find('\n')));
  std::remove("probe.csv");
  std::remove("probe2.csv");
  std::remove("probe3.csv");
}

TEST_CASE("partition json round trip") {
  Partition p;
  p.n_parts = 4;
  p.labels = {0, 1, 2, 3, 3, 2, 1, 0};
  p.part_sizes = {2, 2, 2, 2};
  p.interface_nodes = {3, 5, 9};
  p.pair_interfaces[{0, 1}] = {3, 5};
  p.pair_interfaces[{2, 3}] = {9};
  write_partition_json(p, "part.json");
  const Partition q = read_partition_json("part.json");
  CHECK(q.n_parts == p.n_parts);
  CHECK(q.labels == p.labels);
  CHECK(q.interface_nodes == p.interface_nodes);
  CHECK(q.pair_interfaces == p.pair_interfaces);
  CHECK(q.part_sizes == p.part_sizes);
  std::remove("part.json");
}

TEST_CASE("run config: full parse and strict key checking") {
  {
    std::ofstream os("cfg.json");
    os << R"({
      "mesh": "beam.octm",
      "signals": [{"name": "load", "kind": "ricker", "t1": 0.015, "p0": 2.0}],
      "dirichlet": [{"box": {"lo": [0,0,0], "hi": [0,1,1]}, "components": "xyz"}],
      "neumann": [{"box": {"lo": [16,0,0], "hi": [16,1,1]}, "traction": [-1,0,0], "signal": "load"}],
      "time": {"duration": 0.4, "alpha": 0.1, "safety": 0.9},
      "probes": [{"name": "tip", "position": [16, 0.5, 0.5]}],
      "probe_cadence": 2,
      "snapshots": {"cadence": 50},
      "partition": {"parts": 4, "method": "spectral"},
      "workers": {"count": 4, "backend": "sim"},
      "output_dir": "results"
    })";
  }
  const RunConfig cfg = load_run_config("cfg.json");
  CHECK(cfg.mesh_path == "beam.octm");
  CHECK(cfg.signals.size() == 1);
  CHECK(cfg.signals[0].signal.P0 == 2.0);
  CHECK(cfg.time.alpha == 0.1);
  CHECK(cfg.probe_cadence == 2);
  CHECK(cfg.snapshot_cadence == 50);
  CHECK(cfg.partition_parts == 4);
  CHECK(cfg.partition_method == PartitionMethod::Spectral);
  CHECK(cfg.workers == 4);
  CHECK(cfg.backend == Backend::Sim);
  CHECK(cfg.output_dir == "results");
  std::remove("cfg.json");

  // Unknown keys are rejected (silent-typo guard).
  {
    std::ofstream os("bad.json");
    os << R"({"mesh": "m", "time": {"duration": 1.0}, "probez": []})";
  }
  CHECK_THROWS_AS(load_run_config("bad.json"), Error);
  std::remove("bad.json");
  {
    std::ofstream os("bad2.json");
    os << R"({"mesh": "m", "time": {"duration": 1.0, "dt_max": 2}})";
  }
  CHECK_THROWS_AS(load_run_config("bad2.json"), Error);
  std::remove("bad2.json");
}

TEST_CASE("materialized config resolves probes and loads on the mesh") {
  const OctreeMesh mesh = demo_mesh();
  write_mesh(mesh, "demo.octm");
  {
    std::ofstream os("run.json");
    os << R"({
      "mesh": "demo.octm",
      "signals": [{"name": "s", "kind": "triangle", "t1": 0.1}],
      "dirichlet": [{"box": {"lo": [0,0,0], "hi": [0,1,0.5]}, "components": "x"}],
      "neumann": [{"box": {"lo": [1,0,0], "hi": [1,1,0.5]}, "traction": [5,0,0], "signal": "s"}],
      "point_loads": [{"position": [0.5,0.5,0.25], "force": [0,0,-1], "signal": "s"}],
      "time": {"duration": 0.01},
      "probes": [{"name": "a", "position": [1, 1, 0.5]}, {"name": "b", "node": 0}]
    })";
  }
  const RunConfig cfg = load_run_config("run.json");
  const OctreeMesh loaded = read_mesh(cfg.mesh_path);
  const RunInputs in = materialize(cfg, loaded);
  CHECK(in.probes.size() == 2);
  CHECK(in.probes[1].node == 0);
  CHECK((loaded.node_coords[in.probes[0].node] - Vec3(1, 1, 0.5)).norm() < 1e-12);
  CHECK_FALSE(in.bcs.fixed.empty());
  CHECK_FALSE(in.bcs.loads.empty());
  in.bcs.validate(loaded.n_dof());
  std::remove("demo.octm");
  std::remove("run.json");
}
