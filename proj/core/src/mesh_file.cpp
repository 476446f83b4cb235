#include "octdyn/mesh_file.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "octdyn/transforms.hpp"

namespace octdyn {

namespace {

constexpr char kMagic[4] = {'O', 'C', 'T', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("mesh file truncated");
  return v;
}

}  // namespace

void write_mesh(const OctreeMesh& mesh, const std::string& path) {
  if (!mesh.numbered()) throw Error("write_mesh: mesh has no node numbering");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");

  const bool wide_ids = mesh.n_nodes() > 0xffffffffull;

  nlohmann::json header;
  header["root_size"] = mesh.root_size;
  header["origin"] = {mesh.origin[0], mesh.origin[1], mesh.origin[2]};
  header["coord_bits"] = mesh.coord_bits;
  header["n_nodes"] = mesh.n_nodes();
  header["n_cells"] = mesh.cells.size();
  header["node_id_width"] = wide_ids ? 8 : 4;
  auto mats = nlohmann::json::array();
  for (const auto& [id, m] : mesh.materials.entries()) {
    nlohmann::json jm;
    jm["id"] = id;
    jm["E"] = m.E;
    jm["nu"] = m.nu;
    jm["rho"] = m.rho;
    mats.push_back(jm);
  }
  header["materials"] = mats;
  const std::string hs = header.dump();

  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, static_cast<std::uint64_t>(hs.size()));
  os.write(hs.data(), static_cast<std::streamsize>(hs.size()));

  for (const auto& p : mesh.node_coords) {
    put(os, p[0]);
    put(os, p[1]);
    put(os, p[2]);
  }
  for (const auto& c : mesh.cells) {
    put(os, c.level);
    const Vec3 o = mesh.cell_origin(c);
    put(os, o[0]);
    put(os, o[1]);
    put(os, o[2]);
    put(os, c.material);
    put(os, c.canonical_id);
    put(os, c.transform_id);
    for (const auto n : c.nodes) {
      if (wide_ids)
        put(os, static_cast<std::uint64_t>(n));
      else
        put(os, static_cast<std::uint32_t>(n));
    }
  }
  if (!os) throw Error("write failure on " + path);
}

OctreeMesh read_mesh(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);

  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw Error(path + ": not a mesh file");
  if (take<std::uint32_t>(is) != kVersion) throw Error(path + ": unsupported mesh version");

  const auto hlen = take<std::uint64_t>(is);
  std::string hs(hlen, '\0');
  is.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!is) throw Error("mesh file truncated");
  const nlohmann::json header = nlohmann::json::parse(hs);

  OctreeMesh mesh;
  mesh.root_size = header.at("root_size").get<double>();
  const auto& org = header.at("origin");
  mesh.origin = Vec3(org[0].get<double>(), org[1].get<double>(), org[2].get<double>());
  mesh.coord_bits = header.at("coord_bits").get<int>();
  const auto n_nodes = header.at("n_nodes").get<std::uint64_t>();
  const auto n_cells = header.at("n_cells").get<std::uint64_t>();
  const bool wide_ids = header.at("node_id_width").get<int>() == 8;
  for (const auto& jm : header.at("materials"))
    mesh.materials.set(jm.at("id").get<std::uint16_t>(),
                       {jm.at("E").get<double>(), jm.at("nu").get<double>(),
                        jm.at("rho").get<double>()});

  mesh.node_coords.resize(n_nodes);
  mesh.node_icoords.resize(n_nodes);
  const double unit = mesh.lattice_unit();
  for (std::uint64_t i = 0; i < n_nodes; ++i) {
    Vec3 p;
    p[0] = take<double>(is);
    p[1] = take<double>(is);
    p[2] = take<double>(is);
    mesh.node_coords[i] = p;
    for (int a = 0; a < 3; ++a)
      mesh.node_icoords[i][static_cast<std::size_t>(a)] =
          static_cast<std::int32_t>(std::lround((p[a] - mesh.origin[a]) / unit));
  }

  mesh.cells.resize(n_cells);
  for (std::uint64_t e = 0; e < n_cells; ++e) {
    OctreeCell& c = mesh.cells[e];
    c.level = take<std::uint8_t>(is);
    Vec3 o;
    o[0] = take<double>(is);
    o[1] = take<double>(is);
    o[2] = take<double>(is);
    for (int a = 0; a < 3; ++a)
      c.anchor[static_cast<std::size_t>(a)] =
          static_cast<std::int32_t>(std::lround((o[a] - mesh.origin[a]) / unit));
    c.material = take<std::uint16_t>(is);
    c.canonical_id = take<std::uint8_t>(is);
    c.transform_id = take<std::uint8_t>(is);
    const unsigned cmask = canonical_mask(c.canonical_id);
    const auto& t = transforms48()[static_cast<std::size_t>(inverse(c.transform_id - 1))];
    c.edge_mask = static_cast<std::uint16_t>(apply_to_mask(t, cmask));
    const int nn = cube::node_count(c.edge_mask);
    c.nodes.resize(static_cast<std::size_t>(nn));
    for (int k = 0; k < nn; ++k) {
      c.nodes[static_cast<std::size_t>(k)] =
          wide_ids ? static_cast<NodeId>(take<std::uint64_t>(is))
                   : static_cast<NodeId>(take<std::uint32_t>(is));
    }
  }

  // Corner flags: the first eight node slots of every cell are corners.
  mesh.node_is_corner.assign(n_nodes, 0);
  for (const auto& c : mesh.cells)
    for (int k = 0; k < 8; ++k) mesh.node_is_corner[c.nodes[static_cast<std::size_t>(k)]] = 1;

  mesh.rebuild_index();
  return mesh;
}

}  // namespace octdyn
