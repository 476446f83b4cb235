#include "octdyn/catalog.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "octdyn/face_pattern.hpp"

namespace octdyn {

CellGeometry master_cell_geometry(unsigned edge_mask) {
  CellGeometry geom;
  geom.nodes = cube::node_layout_centered(edge_mask);

  for (int f = 0; f < cube::kNumFaces; ++f) {
    std::array<bool, 4> flags{};
    for (int k = 0; k < 4; ++k) flags[static_cast<std::size_t>(k)] = edge_mask >> cube::kFaceEdges[f][k] & 1u;

    auto local_to_cell = [&](int slot) -> int {
      if (slot < 4) return cube::kFaceCorners[f][slot];
      if (slot < 8) return cube::edge_node_slot(edge_mask, cube::kFaceEdges[f][slot - 4]);
      return cube::face_node_slot(edge_mask, f);
    };

    for (const auto& fe : face_discretization(flags)) {
      SurfaceElement el;
      el.quad = fe.quad;
      for (int a = 0; a < fe.size(); ++a)
        el.nodes[static_cast<std::size_t>(a)] = local_to_cell(fe.nodes[static_cast<std::size_t>(a)]);
      geom.surface.push_back(el);
    }
  }
  return geom;
}

MasterCell build_master_cell(int canonical_id, double nu) {
  MasterCell mc;
  mc.canonical_id = canonical_id;
  mc.nu = nu;
  mc.edge_mask = canonical_mask(canonical_id);
  const CellGeometry geom = master_cell_geometry(mc.edge_mask);
  mc.n_nodes = static_cast<int>(geom.nodes.size());
  try {
    const CellCoefficients coef = cell_coefficients(geom, elasticity_matrix(1.0, nu), 1.0);
    const RadialSolution sol = radial_eigensolve(coef);
    mc.K = stiffness(sol);
    mc.Mcons = consistent_mass(sol, coef.M0);
    mc.Mdiag = lump_mass(mc.Mcons);
    mc.omega_max = element_max_frequency(mc.K, mc.Mdiag);
  } catch (const Error& e) {
    throw Error("master cell " + std::to_string(canonical_id) + " (nu=" + std::to_string(nu) +
                "): " + e.what());
  }
  return mc;
}

std::int64_t PatternCatalog::quantize_nu(double nu) {
  return static_cast<std::int64_t>(std::llround(nu * 1e9));
}

bool PatternCatalog::has(int canonical_id, double nu) const {
  return cells_.count({canonical_id, quantize_nu(nu)}) > 0;
}

const MasterCell& PatternCatalog::get(int canonical_id, double nu) const {
  const auto it = cells_.find({canonical_id, quantize_nu(nu)});
  if (it == cells_.end())
    throw Error("catalog is missing pattern " + std::to_string(canonical_id) + " at nu=" +
                std::to_string(nu));
  return it->second;
}

void PatternCatalog::build(int canonical_id, double nu) {
  const auto key = std::make_pair(canonical_id, quantize_nu(nu));
  if (cells_.count(key)) return;
  cells_.emplace(key, build_master_cell(canonical_id, nu));
}

void PatternCatalog::build_all(double nu, int threads) {
  std::vector<int> todo;
  for (int id = 1; id <= pattern_count(); ++id)
    if (!has(id, nu)) todo.push_back(id);
  if (todo.empty()) return;

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(todo.size())));

  std::vector<MasterCell> built(todo.size());
  if (threads == 1) {
    for (std::size_t i = 0; i < todo.size(); ++i) built[i] = build_master_cell(todo[i], nu);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= todo.size()) return;
          try {
            built[i] = build_master_cell(todo[i], nu);
          } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(t)] = e.what();
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
      if (!err.empty()) throw Error(err);
  }
  for (std::size_t i = 0; i < todo.size(); ++i)
    cells_.emplace(std::make_pair(todo[i], quantize_nu(nu)), std::move(built[i]));
}

void PatternCatalog::ensure(const OctreeMesh& mesh, int threads) {
  std::set<std::pair<int, std::int64_t>> needed;
  for (const auto& c : mesh.cells) {
    if (c.canonical_id == 0) throw Error("mesh cells carry no pattern ids; enumerate first");
    needed.emplace(c.canonical_id, quantize_nu(mesh.materials.get(c.material).nu));
  }
  // Group by nu so the threaded path can be reused.
  std::set<std::int64_t> nus;
  for (const auto& k : needed) nus.insert(k.second);
  for (const auto nu_q : nus) {
    std::vector<int> todo;
    for (const auto& k : needed)
      if (k.second == nu_q && !cells_.count(k)) todo.push_back(k.first);
    if (todo.empty()) continue;
    const double nu = static_cast<double>(nu_q) * 1e-9;
    if (threads == 1 || todo.size() == 1) {
      for (const int id : todo) build(id, nu);
    } else {
      // A handful of patterns at most; building all is hardly slower and
      // keeps the cache reusable across meshes.
      if (todo.size() > 16) {
        build_all(nu, threads);
      } else {
        for (const int id : todo) build(id, nu);
      }
    }
  }
}

std::vector<std::pair<int, std::int64_t>> PatternCatalog::keys() const {
  std::vector<std::pair<int, std::int64_t>> out;
  out.reserve(cells_.size());
  for (const auto& [k, v] : cells_) out.push_back(k);
  return out;
}

}  // namespace octdyn
