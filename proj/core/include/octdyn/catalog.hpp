#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "octdyn/octree.hpp"
#include "octdyn/sbfem.hpp"
#include "octdyn/transforms.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Boundary tessellation of the unit master cell (edge length 1, centered on
/// the scaling center) for a hanging-node mask.
CellGeometry master_cell_geometry(unsigned edge_mask);

/// Precomputed unit-size matrices of one canonical pattern at one Poisson
/// ratio: stiffness at E=1, L=1, masses at rho=1, L=1.
struct MasterCell {
  int canonical_id = 0;
  double nu = 0.0;
  unsigned edge_mask = 0;
  int n_nodes = 0;
  MatrixXd K;
  MatrixXd Mcons;
  VectorXd Mdiag;
  double omega_max = 0.0;
};

/// Runs the SBFEM kernel on the unit cube for one canonical pattern.
MasterCell build_master_cell(int canonical_id, double nu);

/// Immutable-after-build lookup of master cells keyed by
/// (canonical_id, nu quantized to 1e-9).
class PatternCatalog {
 public:
  static std::int64_t quantize_nu(double nu);

  bool has(int canonical_id, double nu) const;
  const MasterCell& get(int canonical_id, double nu) const;

  /// Builds one entry (no-op when present).
  void build(int canonical_id, double nu);

  /// Builds all 144 patterns for one Poisson ratio; `threads <= 0` uses the
  /// hardware concurrency.  Entries are byte-identical to serial builds.
  void build_all(double nu, int threads = 0);

  /// Builds every (pattern, nu) pair the mesh references.
  void ensure(const OctreeMesh& mesh, int threads = 0);

  std::vector<std::pair<int, std::int64_t>> keys() const;
  std::size_t size() const { return cells_.size(); }

  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  std::map<std::pair<int, std::int64_t>, MasterCell> cells_;
};

}  // namespace octdyn
