#pragma once

#include <string>
#include <vector>

#include "octdyn/partition.hpp"
#include "octdyn/timing.hpp"
#include "octdyn/transient.hpp"

namespace octdyn {

/// One CSV per probe: a units comment, a header row and
/// t,u_x,u_y,u_z,a_x,a_y,a_z rows at 17 significant digits (bitwise-stable
/// for diffing).
void write_probe_csv(const ProbeHistory& probe, const std::string& path);
ProbeHistory read_probe_csv(const std::string& path);

/// Partition file: JSON with n_parts, per-element labels and the interface
/// node lists.
void write_partition_json(const Partition& part, const std::string& path);
Partition read_partition_json(const std::string& path);

/// Timing rows (one per run) in the paper's table layout.
void write_timing_csv(const std::vector<TimingReport>& reports, double t_T_1,
                      const std::string& path);

}  // namespace octdyn
