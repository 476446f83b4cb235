#include "octdyn/exchange.hpp"

#include <algorithm>
#include <unordered_map>

namespace octdyn {

ExchangePlan plan_exchange(const SolverTables& tables, const Partition& partition,
                           int n_workers, const BoundaryConditions& bcs) {
  const std::size_t n_e = tables.n_elements();
  const std::size_t n_dof = tables.n_dof;
  if (partition.labels.size() != n_e) throw Error("plan_exchange: partition/mesh mismatch");
  if (n_workers < 1) throw Error("plan_exchange: need at least one worker");
  if (n_workers > partition.n_parts)
    throw Error("plan_exchange: more workers than partition parts");

  ExchangePlan plan;
  plan.n_workers = n_workers;

  // Contiguous part blocks per worker.
  plan.worker_of_element.resize(n_e);
  for (std::size_t e = 0; e < n_e; ++e) {
    const int p = partition.labels[e];
    if (p < 0 || p >= partition.n_parts) throw Error("plan_exchange: part label out of range");
    plan.worker_of_element[e] =
        static_cast<int>(static_cast<std::int64_t>(p) * n_workers / partition.n_parts);
  }

  plan.elements.resize(static_cast<std::size_t>(n_workers));
  for (std::uint32_t e = 0; e < n_e; ++e)
    plan.elements[static_cast<std::size_t>(plan.worker_of_element[e])].push_back(e);

  // DOF ownership: lowest touching worker; interface = touched by >= 2.
  std::vector<std::int8_t> owner(n_dof, -1);
  std::vector<std::uint8_t> multi(n_dof, 0);
  if (n_workers > 127) throw Error("plan_exchange: worker count limit exceeded");
  for (std::uint32_t e = 0; e < n_e; ++e) {
    const std::int8_t w = static_cast<std::int8_t>(plan.worker_of_element[e]);
    for (const auto d : tables.maps[e].dof) {
      if (owner[d] < 0)
        owner[d] = w;
      else if (owner[d] != w) {
        multi[d] = 1;
        owner[d] = std::min(owner[d], w);
      }
    }
  }
  for (std::size_t d = 0; d < n_dof; ++d)
    if (owner[d] < 0) throw Error("plan_exchange: dof not referenced by any element");

  plan.owned.resize(static_cast<std::size_t>(n_workers));
  for (DofId d = 0; d < n_dof; ++d)
    plan.owned[static_cast<std::size_t>(owner[d])].push_back(d);

  std::unordered_map<DofId, std::uint32_t> interface_index;
  for (DofId d = 0; d < n_dof; ++d)
    if (multi[d]) {
      interface_index.emplace(d, static_cast<std::uint32_t>(plan.interface_dofs.size()));
      plan.interface_dofs.push_back(d);
    }

  // Slots: per interface dof, contributing elements ascending.
  std::vector<std::vector<std::uint32_t>> contributors(plan.interface_dofs.size());
  for (std::uint32_t e = 0; e < n_e; ++e)
    for (const auto d : tables.maps[e].dof) {
      const auto it = interface_index.find(d);
      if (it != interface_index.end()) contributors[it->second].push_back(e);
    }
  plan.slot_offset.resize(plan.interface_dofs.size() + 1, 0);
  for (std::size_t i = 0; i < contributors.size(); ++i)
    plan.slot_offset[i + 1] =
        plan.slot_offset[i] + static_cast<std::uint32_t>(contributors[i].size());
  plan.slot_element.reserve(plan.slot_offset.back());
  for (const auto& c : contributors)
    plan.slot_element.insert(plan.slot_element.end(), c.begin(), c.end());

  // Per-worker scatter routing and flat layouts.
  plan.flat_offset.resize(static_cast<std::size_t>(n_workers));
  plan.compute_elements.resize(static_cast<std::size_t>(n_workers));
  plan.compute_offset.resize(static_cast<std::size_t>(n_workers));
  plan.flat_size.resize(static_cast<std::size_t>(n_workers));
  plan.scatter_route.resize(static_cast<std::size_t>(n_workers));
  plan.fold.resize(static_cast<std::size_t>(n_workers));
  plan.owned_fixed.resize(static_cast<std::size_t>(n_workers));
  plan.owned_loads.resize(static_cast<std::size_t>(n_workers));

  for (int w = 0; w < n_workers; ++w) {
    const auto& elems = plan.elements[static_cast<std::size_t>(w)];

    // Group-major compute order with a compact flat layout.
    std::vector<std::uint32_t> order(elems.begin(), elems.end());
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return tables.element_ref[a].group < tables.element_ref[b].group;
    });
    std::unordered_map<std::uint32_t, std::uint64_t> offset_of;
    offset_of.reserve(elems.size() * 2);
    std::uint64_t base = 0;
    auto& corder = plan.compute_elements[static_cast<std::size_t>(w)];
    auto& coff = plan.compute_offset[static_cast<std::size_t>(w)];
    corder = order;
    coff.resize(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      coff[k] = base;
      offset_of.emplace(order[k], base);
      base += static_cast<std::uint64_t>(tables.maps[order[k]].size());
    }
    plan.flat_size[static_cast<std::size_t>(w)] = base;
    auto& foff = plan.flat_offset[static_cast<std::size_t>(w)];
    foff.resize(elems.size());
    for (std::size_t k = 0; k < elems.size(); ++k) foff[k] = offset_of.at(elems[k]);

    // Scatter routing: slot id for interface positions, -1 otherwise.
    auto& route = plan.scatter_route[static_cast<std::size_t>(w)];
    for (const auto e : elems) {
      const auto& map = tables.maps[e];
      for (int i = 0; i < map.size(); ++i) {
        const DofId d = map.dof[static_cast<std::size_t>(i)];
        const auto it = interface_index.find(d);
        if (it == interface_index.end()) {
          route.push_back(-1);
          continue;
        }
        const std::uint32_t lo = plan.slot_offset[it->second];
        const std::uint32_t hi = plan.slot_offset[it->second + 1];
        const auto* begin = plan.slot_element.data() + lo;
        const auto* end = plan.slot_element.data() + hi;
        const auto* pos = std::lower_bound(begin, end, e);
        if (pos == end || *pos != e) throw Error("plan_exchange: slot lookup failed");
        route.push_back(static_cast<std::int64_t>(lo + (pos - begin)));
      }
    }

    // Fold list: owned interface dofs.
    for (const auto d : plan.owned[static_cast<std::size_t>(w)]) {
      const auto it = interface_index.find(d);
      if (it != interface_index.end()) plan.fold[static_cast<std::size_t>(w)].push_back(it->second);
    }

    // Ownership split of the boundary conditions.
    for (const auto d : bcs.fixed)
      if (owner[d] == w) plan.owned_fixed[static_cast<std::size_t>(w)].push_back(d);
    for (const auto& l : bcs.loads)
      if (owner[l.dof] == w) plan.owned_loads[static_cast<std::size_t>(w)].push_back(l);
  }
  return plan;
}

}  // namespace octdyn
