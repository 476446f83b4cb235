#include "octdyn/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

namespace octdyn {

void DualGraph::build_adjacency() {
  adj_offset.assign(n + 1, 0);
  for (const auto& [a, b] : edges) {
    ++adj_offset[a + 1];
    ++adj_offset[b + 1];
  }
  for (std::uint32_t v = 0; v < n; ++v) adj_offset[v + 1] += adj_offset[v];
  adj.resize(2 * edges.size());
  std::vector<std::uint32_t> cursor(adj_offset.begin(), adj_offset.end() - 1);
  for (const auto& [a, b] : edges) {
    adj[cursor[a]++] = b;
    adj[cursor[b]++] = a;
  }
  for (std::uint32_t v = 0; v < n; ++v)
    std::sort(adj.begin() + adj_offset[v], adj.begin() + adj_offset[v + 1]);
}

DualGraph dual_graph(const OctreeMesh& mesh) {
  DualGraph g;
  g.n = static_cast<std::uint32_t>(mesh.cells.size());
  g.coords.resize(g.n);
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;

  for (std::uint32_t e = 0; e < g.n; ++e) {
    const OctreeCell& c = mesh.cells[e];
    g.coords[e] = mesh.cell_center(c);
    const std::int32_t span = mesh.cell_span(c);
    // Six face directions; four quarter probes per face find every neighbor
    // under the 2:1 rule (one coarser/equal cell or up to four finer ones).
    for (int axis = 0; axis < 3; ++axis)
      for (int side = 0; side < 2; ++side) {
        const int ta = (axis + 1) % 3, tb = (axis + 2) % 3;
        for (int qa = 0; qa < 2; ++qa)
          for (int qb = 0; qb < 2; ++qb) {
            std::array<std::int32_t, 3> probe;
            probe[axis] = side ? c.anchor[axis] + span : c.anchor[axis] - 1;
            probe[ta] = c.anchor[ta] + span / 4 + qa * (span / 2);
            probe[tb] = c.anchor[tb] + span / 4 + qb * (span / 2);
            const std::int64_t nb = mesh.leaf_at(probe);
            if (nb < 0 || nb == e) continue;
            const std::uint32_t o = static_cast<std::uint32_t>(nb);
            edges.emplace(std::min(e, o), std::max(e, o));
          }
      }
  }
  g.edges.assign(edges.begin(), edges.end());
  g.build_adjacency();
  return g;
}

namespace {

std::vector<std::uint32_t> components(const DualGraph& g) {
  std::vector<std::uint32_t> comp(g.n, UINT32_MAX);
  std::uint32_t n_comp = 0;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s = 0; s < g.n; ++s) {
    if (comp[s] != UINT32_MAX) continue;
    comp[s] = n_comp;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      for (std::uint32_t i = g.adj_offset[v]; i < g.adj_offset[v + 1]; ++i)
        if (comp[g.adj[i]] == UINT32_MAX) {
          comp[g.adj[i]] = n_comp;
          stack.push_back(g.adj[i]);
        }
    }
    ++n_comp;
  }
  return comp;
}

// Fiedler vector by power iteration on sigma I - L with the constant vector
// deflated; deterministic seeded start, residual tolerance 1e-8.
std::vector<double> fiedler_vector(const DualGraph& g) {
  const std::uint32_t n = g.n;
  std::vector<double> deg(n, 0.0);
  for (const auto& [a, b] : g.edges) {
    deg[a] += 1.0;
    deg[b] += 1.0;
  }
  const double sigma = 2.0 * (*std::max_element(deg.begin(), deg.end())) + 1.0;

  std::mt19937 rng(0x5eedu + n);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = dist(rng);

  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(n);
    for (std::uint32_t i = 0; i < n; ++i) y[i] = (sigma - deg[i]) * x[i];
    for (const auto& [a, b] : g.edges) {
      y[a] += x[b];
      y[b] += x[a];
    }
    return y;
  };
  auto deflate = [&](Eigen::VectorXd& x) { x.array() -= x.mean(); };

  deflate(v);
  if (v.norm() < 1e-30) v[0] = 1.0, deflate(v);
  v.normalize();

  const int max_iter = 200 + 40 * static_cast<int>(std::sqrt(static_cast<double>(n)));
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = apply(v);
    deflate(w);
    const double theta = v.dot(w);
    const double res = (w - theta * v).norm();
    const double wn = w.norm();
    if (wn < 1e-30) break;
    v = w / wn;
    if (res <= 1e-8 * sigma) break;
  }
  return std::vector<double>(v.data(), v.data() + n);
}

// Vertices of a subset ordered by their Fiedler values (ties by id).
std::vector<std::uint32_t> fiedler_order(const DualGraph& g) {
  const std::vector<double> f = fiedler_vector(g);
  std::vector<std::uint32_t> order(g.n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (f[a] != f[b]) return f[a] < f[b];
    return a < b;
  });
  return order;
}

DualGraph subgraph(const DualGraph& g, const std::vector<std::uint32_t>& verts,
                   std::vector<std::uint32_t>& local_of) {
  DualGraph s;
  s.n = static_cast<std::uint32_t>(verts.size());
  s.coords.resize(s.n);
  local_of.assign(g.n, UINT32_MAX);
  for (std::uint32_t i = 0; i < verts.size(); ++i) {
    local_of[verts[i]] = i;
    s.coords[i] = g.coords[verts[i]];
  }
  for (const auto& [a, b] : g.edges)
    if (local_of[a] != UINT32_MAX && local_of[b] != UINT32_MAX)
      s.edges.emplace_back(std::min(local_of[a], local_of[b]), std::max(local_of[a], local_of[b]));
  std::sort(s.edges.begin(), s.edges.end());
  s.build_adjacency();
  return s;
}

}  // namespace

std::vector<int> spectral_bisect(const DualGraph& g) {
  std::vector<int> labels(g.n, 0);
  if (g.n < 2) return labels;
  const std::size_t half = (g.n + 1) / 2;

  const std::vector<std::uint32_t> comp = components(g);
  const std::uint32_t n_comp = *std::max_element(comp.begin(), comp.end()) + 1;

  if (n_comp == 1) {
    const std::vector<std::uint32_t> order = fiedler_order(g);
    for (std::size_t i = half; i < order.size(); ++i) labels[order[i]] = 1;
    return labels;
  }

  // Disconnected: place whole components largest-first into the emptier
  // part; the component that crosses the target size is split by its own
  // Fiedler order.
  std::vector<std::vector<std::uint32_t>> groups(n_comp);
  for (std::uint32_t v = 0; v < g.n; ++v) groups[comp[v]].push_back(v);
  std::vector<std::uint32_t> comp_order(n_comp);
  std::iota(comp_order.begin(), comp_order.end(), 0u);
  std::stable_sort(comp_order.begin(), comp_order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (groups[a].size() != groups[b].size()) return groups[a].size() > groups[b].size();
    return groups[a].front() < groups[b].front();
  });

  std::size_t placed0 = 0;
  for (const auto ci : comp_order) {
    auto& verts = groups[ci];
    if (placed0 + verts.size() <= half) {
      placed0 += verts.size();  // entire component to part 0
      continue;
    }
    if (placed0 >= half) {
      for (const auto v : verts) labels[v] = 1;
      continue;
    }
    // Straddling component: keep the first (half - placed0) vertices in part
    // 0 by local Fiedler order.
    std::vector<std::uint32_t> local_of;
    const DualGraph sub = subgraph(g, verts, local_of);
    const std::vector<std::uint32_t> order = fiedler_order(sub);
    const std::size_t keep = half - placed0;
    for (std::size_t i = keep; i < order.size(); ++i) labels[verts[order[i]]] = 1;
    placed0 = half;
  }
  return labels;
}

std::vector<int> geometric_bisect(const DualGraph& g) {
  std::vector<int> labels(g.n, 0);
  if (g.n < 2) return labels;

  Vec3 mean = Vec3::Zero();
  for (const auto& c : g.coords) mean += c;
  mean /= static_cast<double>(g.n);
  Mat3 cov = Mat3::Zero();
  for (const auto& c : g.coords) {
    const Vec3 d = c - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  const Vec3 axis = es.eigenvectors().col(2);  // largest principal direction

  std::vector<std::uint32_t> order(g.n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double pa = axis.dot(g.coords[a]), pb = axis.dot(g.coords[b]);
    if (pa != pb) return pa < pb;
    return a < b;
  });
  for (std::size_t i = (g.n + 1) / 2; i < order.size(); ++i) labels[order[i]] = 1;
  return labels;
}

Partition partition_graph(const DualGraph& g,
                          const std::vector<std::vector<NodeId>>& element_nodes,
                          std::size_t n_nodes, int n_parts, bool spectral) {
  if (n_parts < 1 || (n_parts & (n_parts - 1)) != 0)
    throw Error("n_parts must be a power of two");
  if (static_cast<std::uint32_t>(n_parts) > g.n)
    throw Error("more parts than elements");

  Partition part;
  part.n_parts = n_parts;
  part.labels.assign(g.n, 0);

  // Recursive bisection on (vertex subset, part id range).
  struct Task {
    std::vector<std::uint32_t> verts;
    int part_lo, part_hi;
  };
  std::vector<Task> stack;
  {
    std::vector<std::uint32_t> all(g.n);
    std::iota(all.begin(), all.end(), 0u);
    stack.push_back({std::move(all), 0, n_parts});
  }
  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    if (task.part_hi - task.part_lo == 1) {
      for (const auto v : task.verts) part.labels[v] = task.part_lo;
      continue;
    }
    std::vector<std::uint32_t> local_of;
    const DualGraph sub = subgraph(g, task.verts, local_of);
    const std::vector<int> half = spectral ? spectral_bisect(sub) : geometric_bisect(sub);
    Task lo, hi;
    lo.part_lo = task.part_lo;
    lo.part_hi = (task.part_lo + task.part_hi) / 2;
    hi.part_lo = lo.part_hi;
    hi.part_hi = task.part_hi;
    for (std::uint32_t i = 0; i < sub.n; ++i)
      (half[i] == 0 ? lo.verts : hi.verts).push_back(task.verts[i]);
    stack.push_back(std::move(lo));
    stack.push_back(std::move(hi));
  }

  part.part_sizes.assign(static_cast<std::size_t>(n_parts), 0);
  for (const auto l : part.labels) ++part.part_sizes[static_cast<std::size_t>(l)];

  // Interface nodes: touched by elements of at least two parts.
  std::vector<int> first_part(n_nodes, -1);
  std::vector<std::uint8_t> is_interface(n_nodes, 0);
  for (std::uint32_t e = 0; e < g.n; ++e)
    for (const auto nd : element_nodes[e]) {
      if (first_part[nd] < 0)
        first_part[nd] = part.labels[e];
      else if (first_part[nd] != part.labels[e])
        is_interface[nd] = 1;
    }
  for (NodeId nd = 0; nd < n_nodes; ++nd)
    if (is_interface[nd]) part.interface_nodes.push_back(nd);

  // Per-pair interface node sets.
  std::vector<std::set<int>> parts_of_node(n_nodes);
  for (std::uint32_t e = 0; e < g.n; ++e)
    for (const auto nd : element_nodes[e])
      if (is_interface[nd]) parts_of_node[nd].insert(part.labels[e]);
  for (NodeId nd = 0; nd < n_nodes; ++nd) {
    const auto& ps = parts_of_node[nd];
    for (auto it = ps.begin(); it != ps.end(); ++it)
      for (auto jt = std::next(it); jt != ps.end(); ++jt)
        part.pair_interfaces[{*it, *jt}].push_back(nd);
  }
  return part;
}

Partition partition_mesh(const OctreeMesh& mesh, int n_parts, PartitionMethod method,
                         double dof_threshold) {
  const DualGraph g = dual_graph(mesh);
  std::vector<std::vector<NodeId>> element_nodes(mesh.cells.size());
  for (std::size_t e = 0; e < mesh.cells.size(); ++e) element_nodes[e] = mesh.cells[e].nodes;
  bool spectral = true;
  switch (method) {
    case PartitionMethod::Spectral: spectral = true; break;
    case PartitionMethod::Geometric: spectral = false; break;
    case PartitionMethod::Auto:
      spectral = static_cast<double>(mesh.n_dof()) < dof_threshold;
      break;
  }
  return partition_graph(g, element_nodes, mesh.n_nodes(), n_parts, spectral);
}

}  // namespace octdyn
