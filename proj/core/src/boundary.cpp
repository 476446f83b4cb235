#include "octdyn/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "octdyn/catalog.hpp"
#include "octdyn/face_pattern.hpp"
#include "octdyn/sbfem.hpp"

namespace octdyn {

void BoundaryConditions::validate(std::size_t n_dof) const {
  if (!std::is_sorted(fixed.begin(), fixed.end())) throw Error("fixed dof list must be sorted");
  if (std::adjacent_find(fixed.begin(), fixed.end()) != fixed.end())
    throw Error("fixed dof list has duplicates");
  for (const auto d : fixed)
    if (d >= n_dof) throw Error("fixed dof out of range");
  for (const auto& l : loads) {
    if (l.dof >= n_dof) throw Error("load dof out of range");
    if (l.signal < 0 || l.signal >= static_cast<int>(signals.size()))
      throw Error("load references unknown signal");
    if (std::binary_search(fixed.begin(), fixed.end(), l.dof))
      throw Error("load applied to a fixed dof " + std::to_string(l.dof));
  }
}

void BoundaryConditions::external_force(double t, VectorXd& R) const {
  R.setZero();
  const std::vector<double> sig = signal_values(t);
  for (const auto& l : loads)
    R[static_cast<Eigen::Index>(l.dof)] += l.amplitude * sig[static_cast<std::size_t>(l.signal)];
}

void BoundaryConditions::update_loaded(const std::vector<double>& sig, VectorXd& R) const {
  for (const auto& l : loads) R[static_cast<Eigen::Index>(l.dof)] = 0.0;
  for (const auto& l : loads)
    R[static_cast<Eigen::Index>(l.dof)] += l.amplitude * sig[static_cast<std::size_t>(l.signal)];
}

std::vector<double> BoundaryConditions::signal_values(double t) const {
  std::vector<double> out(signals.size());
  for (std::size_t i = 0; i < signals.size(); ++i) out[i] = signal_eval(signals[i], t);
  return out;
}

void fix_nodes_in_box(const OctreeMesh& mesh, const BoxRegion& box, unsigned components,
                      BoundaryConditions& bcs) {
  const double pad = mesh.root_size * 1e-9;
  for (NodeId n = 0; n < mesh.n_nodes(); ++n) {
    if (!box.contains(mesh.node_coords[n], pad)) continue;
    for (int c = 0; c < 3; ++c)
      if (components >> c & 1u) bcs.fixed.push_back(3 * static_cast<DofId>(n) + c);
  }
  std::sort(bcs.fixed.begin(), bcs.fixed.end());
  bcs.fixed.erase(std::unique(bcs.fixed.begin(), bcs.fixed.end()), bcs.fixed.end());
}

double apply_surface_traction(const OctreeMesh& mesh, const BoxRegion& box, const Vec3& traction,
                              int signal, BoundaryConditions& bcs) {
  const double pad = mesh.root_size * 1e-9;
  std::map<std::pair<NodeId, int>, double> accum;
  double area = 0.0;

  for (const auto& cell : mesh.cells) {
    if (cell.nodes.empty()) throw Error("apply_surface_traction: mesh has no node numbering");
    const std::int32_t span = mesh.cell_span(cell);
    const CellGeometry geom = master_cell_geometry(cell.edge_mask);
    const double size = mesh.cell_size(cell);
    const Vec3 center = mesh.cell_center(cell);

    for (std::size_t se = 0; se < geom.surface.size(); ++se) {
      const SurfaceElement& el = geom.surface[se];
      const int m = el.size();

      Vec3 centroid = Vec3::Zero();
      for (int a = 0; a < m; ++a)
        centroid += center + size * geom.nodes[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)])];
      centroid /= m;
      if (!box.contains(centroid, pad)) continue;

      // The element lies on one cube face; face index from the dominant
      // centered coordinate.
      Vec3 rel = Vec3::Zero();
      for (int a = 0; a < m; ++a)
        rel += geom.nodes[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)])];
      rel /= m;
      int axis = 0;
      for (int a = 1; a < 3; ++a)
        if (std::abs(rel[a]) > std::abs(rel[axis])) axis = a;
      const bool positive = rel[axis] > 0.0;

      // Probe the lattice cell just beyond the element centroid.
      std::array<std::int32_t, 3> probe;
      for (int a = 0; a < 3; ++a) {
        if (a == axis) {
          probe[a] = positive ? cell.anchor[a] + span : cell.anchor[a] - 1;
        } else {
          const double lat = (centroid[a] - mesh.origin[a]) / mesh.lattice_unit();
          probe[a] = static_cast<std::int32_t>(std::floor(lat));
        }
      }
      if (mesh.leaf_at(probe) >= 0) continue;  // interior face

      // Consistent nodal loads: integrate N^T t over the element.
      double N[4], dNe[4], dNz[4];
      const bool quad = el.quad;
      const std::vector<std::pair<double, std::array<double, 2>>> qps =
          quad ? std::vector<std::pair<double, std::array<double, 2>>>{
                     {1.0, {-0.5773502691896257, -0.5773502691896257}},
                     {1.0, {0.5773502691896257, -0.5773502691896257}},
                     {1.0, {0.5773502691896257, 0.5773502691896257}},
                     {1.0, {-0.5773502691896257, 0.5773502691896257}}}
               : std::vector<std::pair<double, std::array<double, 2>>>{
                     {1.0 / 6.0, {0.5, 0.0}}, {1.0 / 6.0, {0.5, 0.5}}, {1.0 / 6.0, {0.0, 0.5}}};
      for (const auto& [w, xi] : qps) {
        shape_eval(quad, xi[0], xi[1], N, dNe, dNz);
        Vec3 te = Vec3::Zero(), tz = Vec3::Zero();
        for (int a = 0; a < m; ++a) {
          const Vec3 p = size * geom.nodes[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)])];
          te += dNe[a] * p;
          tz += dNz[a] * p;
        }
        const double dA = w * te.cross(tz).norm();
        area += dA;
        for (int a = 0; a < m; ++a) {
          const NodeId g = cell.nodes[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)])];
          for (int c = 0; c < 3; ++c)
            if (traction[c] != 0.0) accum[{g, c}] += N[a] * traction[c] * dA;
        }
      }
    }
  }

  for (const auto& [key, amp] : accum) {
    BoundaryConditions::Load l;
    l.dof = 3 * static_cast<DofId>(key.first) + static_cast<DofId>(key.second);
    l.amplitude = amp;
    l.signal = signal;
    bcs.loads.push_back(l);
  }
  std::sort(bcs.loads.begin(), bcs.loads.end(),
            [](const auto& a, const auto& b) { return a.dof < b.dof; });
  return area;
}

}  // namespace octdyn
