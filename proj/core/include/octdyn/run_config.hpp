#pragma once

#include <optional>
#include <string>
#include <vector>

#include "octdyn/boundary.hpp"
#include "octdyn/integrator.hpp"
#include "octdyn/partition.hpp"
#include "octdyn/spmd.hpp"
#include "octdyn/transient.hpp"

namespace octdyn {

/// Parsed run configuration (JSON, unknown keys rejected).
struct RunConfig {
  std::string mesh_path;

  struct NamedSignal {
    std::string name;
    Signal signal;
  };
  std::vector<NamedSignal> signals;

  struct DirichletSpec {
    BoxRegion box;
    unsigned components = 0x7;
  };
  std::vector<DirichletSpec> dirichlet;

  struct TractionSpec {
    BoxRegion box;
    Vec3 traction = Vec3::Zero();
    std::string signal;
  };
  std::vector<TractionSpec> neumann;

  struct PointLoadSpec {
    std::optional<NodeId> node;
    std::optional<Vec3> position;
    Vec3 force = Vec3::Zero();
    std::string signal;
  };
  std::vector<PointLoadSpec> point_loads;

  TimeSettings time;

  struct ProbeSpec {
    std::string name;
    std::optional<NodeId> node;
    std::optional<Vec3> position;
  };
  std::vector<ProbeSpec> probes;
  int probe_cadence = 1;
  int snapshot_cadence = 0;

  int partition_parts = 0;  ///< 0: derive from workers
  PartitionMethod partition_method = PartitionMethod::Auto;
  double partition_dof_threshold = 5e6;

  int workers = 1;
  Backend backend = Backend::Sim;

  std::string output_dir = "out";
};

RunConfig load_run_config(const std::string& path);

/// Materialized boundary conditions and probes for a concrete mesh.
struct RunInputs {
  BoundaryConditions bcs;
  std::vector<Probe> probes;
};
RunInputs materialize(const RunConfig& config, const OctreeMesh& mesh);

}  // namespace octdyn
