#include "octdyn/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace octdyn {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_probe_csv(const ProbeHistory& probe, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "# probe " << probe.name << " node " << probe.node
     << "; units: t [s], u [m], a [m/s^2]\n";
  os << "t,u_x,u_y,u_z,a_x,a_y,a_z\n";
  for (std::size_t r = 0; r < probe.t.size(); ++r) {
    os << g17(probe.t[r]);
    for (int c = 0; c < 6; ++c) os << ',' << g17(probe.rows[r][static_cast<std::size_t>(c)]);
    os << '\n';
  }
  if (!os) throw Error("write failure on " + path);
}

ProbeHistory read_probe_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  ProbeHistory probe;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    std::istringstream ls(line);
    std::array<double, 7> vals{};
    char comma;
    ls >> vals[0];
    for (int c = 1; c < 7; ++c) ls >> comma >> vals[static_cast<std::size_t>(c)];
    probe.t.push_back(vals[0]);
    probe.rows.push_back({vals[1], vals[2], vals[3], vals[4], vals[5], vals[6]});
  }
  return probe;
}

void write_partition_json(const Partition& part, const std::string& path) {
  nlohmann::json j;
  j["n_parts"] = part.n_parts;
  j["labels"] = part.labels;
  j["interface_nodes"] = part.interface_nodes;
  auto pairs = nlohmann::json::array();
  for (const auto& [key, nodes] : part.pair_interfaces) {
    nlohmann::json p;
    p["parts"] = {key.first, key.second};
    p["nodes"] = nodes;
    pairs.push_back(p);
  }
  j["pair_interfaces"] = pairs;
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << j.dump(1, '\t') << '\n';
}

Partition read_partition_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  nlohmann::json j;
  is >> j;
  Partition part;
  part.n_parts = j.at("n_parts").get<int>();
  part.labels = j.at("labels").get<std::vector<int>>();
  part.interface_nodes = j.at("interface_nodes").get<std::vector<NodeId>>();
  for (const auto& p : j.at("pair_interfaces")) {
    const auto parts = p.at("parts");
    part.pair_interfaces[{parts[0].get<int>(), parts[1].get<int>()}] =
        p.at("nodes").get<std::vector<NodeId>>();
  }
  part.part_sizes.assign(static_cast<std::size_t>(part.n_parts), 0);
  for (const auto l : part.labels) ++part.part_sizes[static_cast<std::size_t>(l)];
  return part;
}

void write_timing_csv(const std::vector<TimingReport>& reports, double t_T_1,
                      const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << TimingReport::csv_header() << '\n';
  for (const auto& r : reports) os << r.csv_row(t_T_1) << '\n';
}

}  // namespace octdyn
