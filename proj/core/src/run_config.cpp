#include "octdyn/run_config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace octdyn {

namespace {

using nlohmann::json;

void expect_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw Error("config: " + where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw Error("config: unknown key '" + key + "' in " + where);
}

Vec3 vec3_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw Error("config: " + where + " must be [x,y,z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

BoxRegion box_of(const json& j, const std::string& where) {
  expect_keys(j, where, {"lo", "hi"});
  BoxRegion b;
  b.lo = vec3_of(j.at("lo"), where + ".lo");
  b.hi = vec3_of(j.at("hi"), where + ".hi");
  return b;
}

unsigned components_of(const std::string& s) {
  unsigned mask = 0;
  for (const char c : s) {
    if (c == 'x') mask |= 1;
    else if (c == 'y') mask |= 2;
    else if (c == 'z') mask |= 4;
    else throw Error("config: components must be a subset of \"xyz\"");
  }
  if (mask == 0) throw Error("config: empty component set");
  return mask;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw Error("config: " + std::string(e.what()));
  }

  expect_keys(j, "config",
              {"mesh", "signals", "dirichlet", "neumann", "point_loads", "time", "probes",
               "probe_cadence", "snapshots", "partition", "workers", "output_dir"});

  RunConfig cfg;
  cfg.mesh_path = j.at("mesh").get<std::string>();

  for (const auto& js : j.value("signals", json::array())) {
    expect_keys(js, "signal", {"name", "kind", "t1", "p0", "n"});
    RunConfig::NamedSignal s;
    s.name = js.at("name").get<std::string>();
    s.signal.kind = signal_kind_from_string(js.at("kind").get<std::string>());
    s.signal.t1 = js.at("t1").get<double>();
    s.signal.P0 = js.value("p0", 1.0);
    s.signal.n = js.value("n", 5);
    s.signal.validate();
    cfg.signals.push_back(std::move(s));
  }

  for (const auto& jd : j.value("dirichlet", json::array())) {
    expect_keys(jd, "dirichlet entry", {"box", "components"});
    RunConfig::DirichletSpec d;
    d.box = box_of(jd.at("box"), "dirichlet.box");
    d.components = components_of(jd.value("components", std::string("xyz")));
    cfg.dirichlet.push_back(d);
  }

  for (const auto& jn : j.value("neumann", json::array())) {
    expect_keys(jn, "neumann entry", {"box", "traction", "signal"});
    RunConfig::TractionSpec t;
    t.box = box_of(jn.at("box"), "neumann.box");
    t.traction = vec3_of(jn.at("traction"), "neumann.traction");
    t.signal = jn.at("signal").get<std::string>();
    cfg.neumann.push_back(std::move(t));
  }

  for (const auto& jp : j.value("point_loads", json::array())) {
    expect_keys(jp, "point load", {"node", "position", "force", "signal"});
    RunConfig::PointLoadSpec p;
    if (jp.contains("node")) p.node = jp.at("node").get<NodeId>();
    if (jp.contains("position")) p.position = vec3_of(jp.at("position"), "point_load.position");
    if (!p.node.has_value() && !p.position.has_value())
      throw Error("config: point load needs node or position");
    p.force = vec3_of(jp.at("force"), "point_load.force");
    p.signal = jp.at("signal").get<std::string>();
    cfg.point_loads.push_back(std::move(p));
  }

  {
    const auto& jt = j.at("time");
    expect_keys(jt, "time", {"dt", "duration", "alpha", "safety"});
    cfg.time.dt = jt.value("dt", 0.0);
    cfg.time.duration = jt.at("duration").get<double>();
    cfg.time.alpha = jt.value("alpha", 0.0);
    cfg.time.safety = jt.value("safety", 0.95);
    if (!(cfg.time.duration > 0.0)) throw Error("config: time.duration must be positive");
    if (!(cfg.time.safety > 0.0 && cfg.time.safety <= 1.0))
      throw Error("config: time.safety must lie in (0,1]");
  }

  for (const auto& jp : j.value("probes", json::array())) {
    expect_keys(jp, "probe", {"name", "node", "position"});
    RunConfig::ProbeSpec p;
    p.name = jp.at("name").get<std::string>();
    if (jp.contains("node")) p.node = jp.at("node").get<NodeId>();
    if (jp.contains("position")) p.position = vec3_of(jp.at("position"), "probe.position");
    if (!p.node.has_value() && !p.position.has_value())
      throw Error("config: probe needs node or position");
    cfg.probes.push_back(std::move(p));
  }
  cfg.probe_cadence = j.value("probe_cadence", 1);
  if (cfg.probe_cadence < 1) throw Error("config: probe_cadence must be >= 1");

  if (j.contains("snapshots")) {
    expect_keys(j.at("snapshots"), "snapshots", {"cadence"});
    cfg.snapshot_cadence = j.at("snapshots").value("cadence", 0);
    if (cfg.snapshot_cadence < 0) throw Error("config: snapshot cadence must be >= 0");
  }

  if (j.contains("partition")) {
    const auto& jp = j.at("partition");
    expect_keys(jp, "partition", {"parts", "method", "dof_threshold"});
    cfg.partition_parts = jp.value("parts", 0);
    const std::string m = jp.value("method", std::string("auto"));
    if (m == "auto") cfg.partition_method = PartitionMethod::Auto;
    else if (m == "spectral") cfg.partition_method = PartitionMethod::Spectral;
    else if (m == "geometric") cfg.partition_method = PartitionMethod::Geometric;
    else throw Error("config: unknown partition method " + m);
    cfg.partition_dof_threshold = jp.value("dof_threshold", 5e6);
  }

  if (j.contains("workers")) {
    const auto& jw = j.at("workers");
    expect_keys(jw, "workers", {"count", "backend"});
    cfg.workers = jw.value("count", 1);
    if (cfg.workers < 1) throw Error("config: workers.count must be >= 1");
    cfg.backend = backend_from_string(jw.value("backend", std::string("sim")));
  }

  cfg.output_dir = j.value("output_dir", std::string("out"));
  return cfg;
}

RunInputs materialize(const RunConfig& config, const OctreeMesh& mesh) {
  RunInputs in;
  auto signal_index = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < config.signals.size(); ++i)
      if (config.signals[i].name == name) return static_cast<int>(i);
    throw Error("config: reference to unknown signal '" + name + "'");
  };
  for (const auto& s : config.signals) in.bcs.signals.push_back(s.signal);

  for (const auto& d : config.dirichlet) fix_nodes_in_box(mesh, d.box, d.components, in.bcs);

  for (const auto& t : config.neumann)
    apply_surface_traction(mesh, t.box, t.traction, signal_index(t.signal), in.bcs);

  for (const auto& p : config.point_loads) {
    const NodeId n = p.node ? *p.node : nearest_node(mesh, *p.position);
    if (n >= mesh.n_nodes()) throw Error("config: point load node out of range");
    for (int c = 0; c < 3; ++c)
      if (p.force[c] != 0.0)
        in.bcs.loads.push_back(
            {3 * static_cast<DofId>(n) + static_cast<DofId>(c), p.force[c],
             signal_index(p.signal)});
  }
  std::sort(in.bcs.loads.begin(), in.bcs.loads.end(),
            [](const auto& a, const auto& b) { return a.dof < b.dof; });

  for (const auto& p : config.probes) {
    Probe probe;
    probe.name = p.name;
    probe.node = p.node ? *p.node : nearest_node(mesh, *p.position);
    if (probe.node >= mesh.n_nodes()) throw Error("config: probe node out of range");
    in.probes.push_back(std::move(probe));
  }
  return in;
}

}  // namespace octdyn
