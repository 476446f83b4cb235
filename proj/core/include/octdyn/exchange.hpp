#pragma once

#include <cstdint>
#include <vector>

#include "octdyn/boundary.hpp"
#include "octdyn/partition.hpp"
#include "octdyn/solver_tables.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Deterministic SPMD data plan derived from a partition.
///
/// Every DOF is owned by the lowest-id worker whose elements touch it.
/// Interface DOFs (touched by several workers) carry one slot per
/// contributing element; the force sum folds those slots in ascending global
/// element order, so any worker count reproduces the serial reduction
/// bitwise.
struct ExchangePlan {
  int n_workers = 1;
  std::vector<int> worker_of_element;

  // Per worker, all ascending:
  std::vector<std::vector<std::uint32_t>> elements;        ///< scatter order
  std::vector<std::vector<std::uint64_t>> flat_offset;     ///< aligned with elements
  std::vector<std::vector<std::uint32_t>> compute_elements;  ///< group-major order
  std::vector<std::vector<std::uint64_t>> compute_offset;
  std::vector<std::uint64_t> flat_size;
  std::vector<std::vector<DofId>> owned;
  std::vector<std::vector<DofId>> owned_fixed;
  std::vector<std::vector<BoundaryConditions::Load>> owned_loads;

  /// Scatter routing per worker, aligned with the concatenated DOF positions
  /// of its elements in ascending order: slot id, or -1 for a worker-internal
  /// accumulation.
  std::vector<std::vector<std::int64_t>> scatter_route;

  // Global interface tables (read-only during the run):
  std::vector<DofId> interface_dofs;           ///< ascending (canonical order)
  std::vector<std::uint32_t> slot_offset;      ///< per interface dof, size+1
  std::vector<std::uint32_t> slot_element;     ///< contributing element per slot

  /// Fold work per worker: owned interface dofs as indices into
  /// interface_dofs.
  std::vector<std::vector<std::uint32_t>> fold;

  std::size_t n_slots() const { return slot_element.size(); }
};

/// Builds the plan; loads/fixed sets are split by DOF ownership.
ExchangePlan plan_exchange(const SolverTables& tables, const Partition& partition,
                           int n_workers, const BoundaryConditions& bcs);

}  // namespace octdyn
