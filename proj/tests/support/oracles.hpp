#pragma once

// Plain reference implementations used to cross-check the instrumented
// kernels. Kept deliberately simple and structurally different from the
// library code: queue BFS, flood fill, cubic triangle scan, textbook
// shortest-path dependency accumulation.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "branchlab/graph.hpp"

namespace oracles {

using branchlab::Graph;
using branchlab::NodeId;

inline std::vector<int> bfs_depths(const Graph& g, NodeId source) {
  std::vector<int> depth(g.num_nodes(), -1);
  std::deque<NodeId> q;
  depth[source] = 0;
  q.push_back(source);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop_front();
    for (NodeId v : g.out_neigh(u)) {
      if (depth[v] == -1) {
        depth[v] = depth[u] + 1;
        q.push_back(v);
      }
    }
  }
  return depth;
}

// Weakly connected labels: flood fill ignoring edge direction.
inline std::vector<NodeId> components(const Graph& g) {
  std::vector<NodeId> label(g.num_nodes(), -1);
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (label[s] != -1) continue;
    label[s] = s;
    std::deque<NodeId> q = {s};
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop_front();
      auto push = [&](NodeId v) {
        if (label[v] == -1) {
          label[v] = s;
          q.push_back(v);
        }
      };
      for (NodeId v : g.out_neigh(u)) push(v);
      for (NodeId v : g.in_neigh(u)) push(v);
    }
  }
  return label;
}

// True iff two labelings induce the same partition of the vertices.
inline bool same_partition(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  if (a.size() != b.size()) return false;
  std::vector<NodeId> a_to_b(a.size(), -1), b_to_a(b.size(), -1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a_to_b[a[i]] == -1) a_to_b[a[i]] = b[i];
    if (b_to_a[b[i]] == -1) b_to_a[b[i]] = a[i];
    if (a_to_b[a[i]] != b[i] || b_to_a[b[i]] != a[i]) return false;
  }
  return true;
}

inline std::uint64_t triangles(const Graph& g) {
  const NodeId n = g.num_nodes();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.out_neigh(u)) adj[u][v] = 1;
  std::uint64_t count = 0;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      for (NodeId w = v + 1; w < n; ++w)
        if (adj[u][v] && adj[v][w] && adj[u][w]) ++count;
  return count;
}

// Brandes betweenness over the given sources, no normalization. Sources do
// not accumulate dependency onto themselves.
inline std::vector<double> brandes(const Graph& g, const std::vector<NodeId>& sources) {
  const NodeId n = g.num_nodes();
  std::vector<double> centrality(n, 0.0);
  for (NodeId s : sources) {
    std::vector<std::vector<NodeId>> preds(n);
    std::vector<std::int64_t> sigma(n, 0);
    std::vector<int> dist(n, -1);
    std::vector<NodeId> order;
    sigma[s] = 1;
    dist[s] = 0;
    std::deque<NodeId> q = {s};
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop_front();
      order.push_back(u);
      for (NodeId v : g.out_neigh(u)) {
        if (dist[v] == -1) {
          dist[v] = dist[u] + 1;
          q.push_back(v);
        }
        if (dist[v] == dist[u] + 1) {
          sigma[v] += sigma[u];
          preds[v].push_back(u);
        }
      }
    }
    std::vector<double> delta(n, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId w = *it;
      for (NodeId u : preds[w])
        delta[u] += static_cast<double>(sigma[u]) / static_cast<double>(sigma[w]) *
                    (1.0 + delta[w]);
      if (w != s) centrality[w] += delta[w];
    }
  }
  return centrality;
}

// Independent power-iteration PageRank (Jacobi, dangling mass dropped the
// same way the kernel drops it: missing out-degree contributes nothing).
inline std::vector<double> pagerank(const Graph& g, double d, int iters) {
  const NodeId n = g.num_nodes();
  if (n == 0) return {};
  std::vector<double> x(n, 1.0 / n), y(n);
  for (int it = 0; it < iters; ++it) {
    std::fill(y.begin(), y.end(), (1.0 - d) / n);
    for (NodeId u = 0; u < n; ++u) {
      if (!g.out_degree(u)) continue;
      double share = d * x[u] / static_cast<double>(g.out_degree(u));
      for (NodeId v : g.out_neigh(u)) y[v] += share;
    }
    x.swap(y);
  }
  return x;
}

}  // namespace oracles
