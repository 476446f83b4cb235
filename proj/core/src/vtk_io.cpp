#include "octdyn/vtk_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace octdyn {

namespace {

// My corner bit order -> VTK hexahedron loop.
constexpr int kVtkOrder[8] = {0, 1, 3, 2, 4, 5, 7, 6};

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<NodeId> corner_nodes(const OctreeMesh& mesh) {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < mesh.n_nodes(); ++n)
    if (mesh.node_is_corner[n]) out.push_back(n);
  return out;
}

void write_vtk(const OctreeMesh& mesh, const VectorXd& displacement,
               const std::vector<int>* part_labels, const std::string& path) {
  if (!mesh.numbered()) throw Error("write_vtk: mesh has no node numbering");
  if (displacement.size() != static_cast<Eigen::Index>(mesh.n_dof()))
    throw Error("write_vtk: displacement length mismatch");
  if (part_labels && part_labels->size() != mesh.cells.size())
    throw Error("write_vtk: part label length mismatch");

  const std::vector<NodeId> corners = corner_nodes(mesh);
  std::unordered_map<NodeId, std::uint64_t> point_of;
  point_of.reserve(corners.size() * 2);
  for (std::uint64_t i = 0; i < corners.size(); ++i) point_of.emplace(corners[i], i);

  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "# vtk DataFile Version 3.0\n";
  os << "octdyn displacement snapshot\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << corners.size() << " double\n";
  for (const auto n : corners) {
    const Vec3& p = mesh.node_coords[n];
    os << g17(p[0]) << ' ' << g17(p[1]) << ' ' << g17(p[2]) << '\n';
  }
  os << "CELLS " << mesh.cells.size() << ' ' << 9 * mesh.cells.size() << '\n';
  for (const auto& c : mesh.cells) {
    os << '8';
    for (int k = 0; k < 8; ++k)
      os << ' ' << point_of.at(c.nodes[static_cast<std::size_t>(kVtkOrder[k])]);
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.cells.size() << '\n';
  for (std::size_t e = 0; e < mesh.cells.size(); ++e) os << "12\n";

  os << "POINT_DATA " << corners.size() << '\n';
  os << "VECTORS displacement double\n";
  for (const auto n : corners) {
    const DofId d = 3 * static_cast<DofId>(n);
    os << g17(displacement[static_cast<Eigen::Index>(d)]) << ' '
       << g17(displacement[static_cast<Eigen::Index>(d + 1)]) << ' '
       << g17(displacement[static_cast<Eigen::Index>(d + 2)]) << '\n';
  }
  os << "SCALARS magnitude double\nLOOKUP_TABLE default\n";
  for (const auto n : corners) {
    const DofId d = 3 * static_cast<DofId>(n);
    const double m = std::sqrt(
        displacement[static_cast<Eigen::Index>(d)] * displacement[static_cast<Eigen::Index>(d)] +
        displacement[static_cast<Eigen::Index>(d + 1)] * displacement[static_cast<Eigen::Index>(d + 1)] +
        displacement[static_cast<Eigen::Index>(d + 2)] * displacement[static_cast<Eigen::Index>(d + 2)]);
    os << g17(m) << '\n';
  }
  os << "SCALARS node_id vtktypeint64\nLOOKUP_TABLE default\n";
  for (const auto n : corners) os << n << '\n';

  os << "CELL_DATA " << mesh.cells.size() << '\n';
  os << "SCALARS material int\nLOOKUP_TABLE default\n";
  for (const auto& c : mesh.cells) os << c.material << '\n';
  if (part_labels) {
    os << "SCALARS part int\nLOOKUP_TABLE default\n";
    for (const auto l : *part_labels) os << l << '\n';
  }
  if (!os) throw Error("write failure on " + path);
}

VtkSnapshot read_vtk(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  VtkSnapshot snap;
  std::string line;
  std::size_t n_points = 0, n_cells = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "POINTS") {
      ls >> n_points;
      snap.points.resize(n_points);
      for (std::size_t i = 0; i < n_points; ++i)
        is >> snap.points[i][0] >> snap.points[i][1] >> snap.points[i][2];
    } else if (tag == "CELLS") {
      ls >> n_cells;
      snap.cells.resize(n_cells);
      for (std::size_t e = 0; e < n_cells; ++e) {
        int cnt;
        is >> cnt;
        if (cnt != 8) throw Error("read_vtk: expected hexahedra");
        for (int k = 0; k < 8; ++k) is >> snap.cells[e][static_cast<std::size_t>(k)];
      }
    } else if (tag == "VECTORS") {
      snap.displacement.resize(n_points);
      for (std::size_t i = 0; i < n_points; ++i)
        is >> snap.displacement[i][0] >> snap.displacement[i][1] >> snap.displacement[i][2];
    } else if (tag == "SCALARS") {
      std::string name;
      ls >> name;
      std::getline(is, line);  // LOOKUP_TABLE
      if (name == "magnitude") {
        double tmp;
        for (std::size_t i = 0; i < n_points; ++i) is >> tmp;
      } else if (name == "node_id") {
        snap.node_ids.resize(n_points);
        for (std::size_t i = 0; i < n_points; ++i) is >> snap.node_ids[i];
      } else if (name == "material") {
        snap.material.resize(n_cells);
        for (std::size_t i = 0; i < n_cells; ++i) is >> snap.material[i];
      } else if (name == "part") {
        snap.part.resize(n_cells);
        for (std::size_t i = 0; i < n_cells; ++i) is >> snap.part[i];
      }
    }
  }
  return snap;
}

}  // namespace octdyn
