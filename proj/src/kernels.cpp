#include "branchlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "branchlab/errors.hpp"
#include "branchlab/rng.hpp"

namespace branchlab {

namespace {
// Fixed seed for Afforest's frequent-component sampling; pinned so repeated
// runs stay byte-identical.
constexpr std::uint64_t kCcSampleSeed = 0x5AFE5EEDULL;
}  // namespace

// ---------------------------------------------------------------------------
// BFS (direction-optimizing)

namespace {

std::int64_t bfs_bottom_up_step(const Graph& g, std::vector<NodeId>& parent,
                                std::vector<std::uint8_t>& front, std::vector<std::uint8_t>& next,
                                TraceSink& sink, std::uint16_t s52, std::uint16_t s53,
                                std::uint16_t s54) {
  std::int64_t awake_count = 0;
  std::fill(next.begin(), next.end(), 0);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    bool unvisited = parent[u] < 0;
    sink.emit(s52, unvisited);
    if (!unvisited) continue;
    bool found = false;
    for (NodeId v : g.in_neigh(u)) {
      sink.emit(s53, true);
      bool in_front = front[v] != 0;
      sink.emit(s54, in_front);
      if (in_front) {
        parent[u] = v;
        ++awake_count;
        next[u] = 1;
        found = true;
        break;  // leaving via break skips the loop-exit test
      }
    }
    if (!found) sink.emit(s53, false);
  }
  return awake_count;
}

std::int64_t bfs_top_down_step(const Graph& g, std::vector<NodeId>& parent,
                               const std::vector<NodeId>& queue, std::vector<NodeId>& out_queue,
                               TraceSink& sink, std::uint16_t s76, std::uint16_t s78) {
  std::int64_t scout_count = 0;
  for (NodeId u : queue) {
    for (NodeId v : g.out_neigh(u)) {
      sink.emit(s76, true);
      NodeId curr_val = parent[v];
      bool unvisited = curr_val < 0;
      sink.emit(s78, unvisited);
      if (unvisited) {
        parent[v] = u;
        out_queue.push_back(v);
        scout_count += -curr_val;
      }
    }
    sink.emit(s76, false);
  }
  return scout_count;
}

}  // namespace

std::vector<NodeId> run_bfs(const Graph& g, const BfsParams& p, TraceSink& sink) {
  const NodeId n = g.num_nodes();
  if (p.source < 0 || p.source >= n) throw UsageError("bfs: source out of range");
  if (p.alpha <= 0 || p.beta <= 0) throw UsageError("bfs: alpha and beta must be positive");
  std::uint16_t s52 = sink.declare_site(Kernel::bfs, 52);
  std::uint16_t s53 = sink.declare_site(Kernel::bfs, 53);
  std::uint16_t s54 = sink.declare_site(Kernel::bfs, 54);
  std::uint16_t s76 = sink.declare_site(Kernel::bfs, 76);
  std::uint16_t s78 = sink.declare_site(Kernel::bfs, 78);

  std::vector<NodeId> parent(n);
  for (NodeId u = 0; u < n; ++u)
    parent[u] = g.out_degree(u) != 0 ? static_cast<NodeId>(-g.out_degree(u)) : -1;
  parent[p.source] = p.source;

  std::vector<NodeId> queue = {p.source}, next_queue;
  std::vector<std::uint8_t> front(n, 0), curr(n, 0);
  std::int64_t edges_to_check = g.num_edges();
  std::int64_t scout_count = g.out_degree(p.source);

  while (!queue.empty()) {
    if (scout_count > edges_to_check / p.alpha) {
      std::fill(front.begin(), front.end(), 0);
      for (NodeId u : queue) front[u] = 1;
      std::int64_t awake_count = static_cast<std::int64_t>(queue.size());
      std::int64_t old_awake_count;
      do {
        old_awake_count = awake_count;
        awake_count = bfs_bottom_up_step(g, parent, front, curr, sink, s52, s53, s54);
        front.swap(curr);
      } while (awake_count >= old_awake_count ||
               awake_count > n / p.beta);
      queue.clear();
      for (NodeId u = 0; u < n; ++u)
        if (front[u]) queue.push_back(u);
      scout_count = 1;
    } else {
      edges_to_check -= scout_count;
      next_queue.clear();
      scout_count = bfs_top_down_step(g, parent, queue, next_queue, sink, s76, s78);
      queue.swap(next_queue);
    }
  }
  for (NodeId u = 0; u < n; ++u)
    if (parent[u] < -1) parent[u] = -1;
  return parent;
}

// ---------------------------------------------------------------------------
// PageRank (pull, Jacobi)

std::vector<double> run_pagerank(const Graph& g, const PageRankParams& p, TraceSink& sink) {
  if (p.max_iters < 0) throw UsageError("pr: max_iters must be >= 0");
  if (!(p.damping >= 0.0 && p.damping <= 1.0)) throw UsageError("pr: damping must be in [0, 1]");
  std::uint16_t s46 = sink.declare_site(Kernel::pr, 46);
  std::uint16_t s48 = sink.declare_site(Kernel::pr, 48);

  const NodeId n = g.num_nodes();
  const double init_score = n ? 1.0 / n : 0.0;
  const double base_score = n ? (1.0 - p.damping) / n : 0.0;
  std::vector<double> scores(n, init_score), outgoing_contrib(n, 0.0), old_scores(n);
  for (int iter = 0; iter < p.max_iters; ++iter) {
    for (NodeId u = 0; u < n; ++u)
      outgoing_contrib[u] = g.out_degree(u) ? scores[u] / g.out_degree(u) : 0.0;
    old_scores = scores;
    double error = 0.0;
    for (NodeId u = 0;; ++u) {
      bool more = u < n;
      sink.emit(s46, more);
      if (!more) break;
      double incoming_total = 0.0;
      for (NodeId v : g.in_neigh(u)) {
        sink.emit(s48, true);
        incoming_total += outgoing_contrib[v];
      }
      sink.emit(s48, false);
      scores[u] = base_score + p.damping * incoming_total;
      error += std::fabs(scores[u] - old_scores[u]);
    }
    if (error < p.tolerance) break;
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Connected components (Afforest)

namespace {

void cc_link(NodeId u, NodeId v, std::vector<NodeId>& comp, TraceSink& sink, std::uint16_t s45,
             std::uint16_t s50) {
  NodeId p1 = comp[u];
  NodeId p2 = comp[v];
  while (true) {
    bool differ = p1 != p2;
    sink.emit(s45, differ);
    if (!differ) break;
    NodeId high = p1 > p2 ? p1 : p2;
    NodeId low = p1 + (p2 - high);
    NodeId p_high = comp[high];
    // Single event for the whole short-circuit condition; the sequential
    // compare-and-swap always succeeds once attempted.
    bool hooked = (p_high == low) || (p_high == high);
    sink.emit(s50, hooked);
    if (p_high == high) comp[high] = low;
    if (hooked) break;
    p1 = comp[comp[high]];
    p2 = comp[low];
  }
}

void cc_compress(NodeId n, std::vector<NodeId>& comp, TraceSink& sink, std::uint16_t s63) {
  for (NodeId u = 0; u < n; ++u) {
    while (true) {
      bool chase = comp[u] != comp[comp[u]];
      sink.emit(s63, chase);
      if (!chase) break;
      comp[u] = comp[comp[u]];
    }
  }
}

NodeId cc_sample_frequent(const std::vector<NodeId>& comp) {
  if (comp.empty()) return 0;
  SplitMix64 rng(kCcSampleSeed);
  const std::size_t samples = std::min<std::size_t>(1024, comp.size());
  std::map<NodeId, int> counts;
  for (std::size_t i = 0; i < samples; ++i)
    ++counts[comp[rng.next_below(comp.size())]];
  NodeId best = 0;
  int best_count = -1;
  for (auto [label, count] : counts) {
    if (count > best_count) {  // ties resolve to the smallest label
      best = label;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

std::vector<NodeId> run_cc(const Graph& g, const CcParams& p, TraceSink& sink) {
  if (p.neighbor_rounds < 0) throw UsageError("cc: neighbor_rounds must be >= 0");
  std::uint16_t s45 = sink.declare_site(Kernel::cc, 45);
  std::uint16_t s50 = sink.declare_site(Kernel::cc, 50);
  std::uint16_t s63 = sink.declare_site(Kernel::cc, 63);
  std::uint16_t s137 = sink.declare_site(Kernel::cc, 137);
  std::uint16_t s141 = sink.declare_site(Kernel::cc, 141);

  const NodeId n = g.num_nodes();
  std::vector<NodeId> comp(n);
  for (NodeId u = 0; u < n; ++u) comp[u] = u;

  for (int r = 0; r < p.neighbor_rounds; ++r) {
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v : g.out_neigh(u, r)) {
        cc_link(u, v, comp, sink, s45, s50);
        break;  // only the r-th neighbor this round
      }
    }
    cc_compress(n, comp, sink, s63);
  }

  const NodeId c = cc_sample_frequent(comp);
  for (NodeId u = 0; u < n; ++u) {
    if (comp[u] == c) continue;
    for (NodeId v : g.out_neigh(u, p.neighbor_rounds)) {
      sink.emit(s137, true);
      cc_link(u, v, comp, sink, s45, s50);
    }
    sink.emit(s137, false);
    if (g.directed()) {
      for (NodeId v : g.in_neigh(u)) {
        sink.emit(s141, true);
        cc_link(u, v, comp, sink, s45, s50);
      }
      sink.emit(s141, false);
    }
  }
  cc_compress(n, comp, sink, s63);
  return comp;
}

// ---------------------------------------------------------------------------
// Betweenness centrality (Brandes)

namespace {

void bc_accumulate_from_source(const Graph& g, NodeId source, std::vector<double>& scores,
                               std::vector<int>& depths, std::vector<std::int64_t>& path_counts,
                               std::vector<double>& deltas, std::vector<bool>& succ,
                               TraceSink& sink, std::uint16_t s70, std::uint16_t s71,
                               std::uint16_t s75, std::uint16_t s125, std::uint16_t s126) {
  std::fill(depths.begin(), depths.end(), -1);
  std::fill(path_counts.begin(), path_counts.end(), 0);
  std::fill(deltas.begin(), deltas.end(), 0.0);
  std::fill(succ.begin(), succ.end(), false);

  depths[source] = 0;
  path_counts[source] = 1;
  std::vector<std::vector<NodeId>> levels = {{source}};
  int depth = 0;
  while (!levels.back().empty()) {
    ++depth;
    std::vector<NodeId> next;
    for (NodeId u : levels.back()) {
      auto neigh = g.out_neigh(u);
      for (std::size_t i = 0; i < neigh.size(); ++i) {
        sink.emit(s70, true);
        NodeId v = neigh[i];
        bool undiscovered = depths[v] == -1;
        sink.emit(s71, undiscovered);  // whole short-circuit condition; CAS succeeds
        if (undiscovered) {
          depths[v] = depth;
          next.push_back(v);
        }
        bool same_depth = depths[v] == depth;
        sink.emit(s75, same_depth);
        if (same_depth) {
          succ[g.out_offset(u) + static_cast<std::int64_t>(i)] = true;
          path_counts[v] += path_counts[u];
        }
      }
      sink.emit(s70, false);
    }
    levels.push_back(std::move(next));
  }
  levels.pop_back();  // trailing empty level

  for (auto level = levels.rbegin(); level != levels.rend(); ++level) {
    for (NodeId u : *level) {
      double delta_u = 0.0;
      auto neigh = g.out_neigh(u);
      for (std::size_t i = 0; i < neigh.size(); ++i) {
        sink.emit(s125, true);
        NodeId v = neigh[i];
        bool is_succ = succ[g.out_offset(u) + static_cast<std::int64_t>(i)];
        sink.emit(s126, is_succ);
        if (is_succ) {
          delta_u += static_cast<double>(path_counts[u]) / static_cast<double>(path_counts[v]) *
                     (1.0 + deltas[v]);
        }
      }
      sink.emit(s125, false);
      deltas[u] = delta_u;
      if (u != source) scores[u] += delta_u;  // a source earns no dependency on itself
    }
  }
}

}  // namespace

BcResult run_bc(const Graph& g, const BcParams& p, TraceSink& sink) {
  if (!p.all_sources && p.num_sources < 0) throw UsageError("bc: num_sources must be >= 0");
  std::uint16_t s70 = sink.declare_site(Kernel::bc, 70);
  std::uint16_t s71 = sink.declare_site(Kernel::bc, 71);
  std::uint16_t s75 = sink.declare_site(Kernel::bc, 75);
  std::uint16_t s125 = sink.declare_site(Kernel::bc, 125);
  std::uint16_t s126 = sink.declare_site(Kernel::bc, 126);

  const NodeId n = g.num_nodes();
  BcResult result;
  result.scores.assign(n, 0.0);

  std::vector<NodeId> sources;
  if (p.all_sources) {
    sources.resize(n);
    for (NodeId u = 0; u < n; ++u) sources[u] = u;
  } else if (g.num_edges() > 0) {
    SplitMix64 rng(p.seed);
    for (int i = 0; i < p.num_sources; ++i) {
      NodeId s;
      do {
        s = static_cast<NodeId>(rng.next_below(n));
      } while (g.out_degree(s) == 0);
      sources.push_back(s);
    }
  }

  std::vector<int> depths(n);
  std::vector<std::int64_t> path_counts(n);
  std::vector<double> deltas(n);
  std::vector<bool> succ(g.num_edges());
  for (NodeId s : sources)
    bc_accumulate_from_source(g, s, result.scores, depths, path_counts, deltas, succ, sink, s70,
                              s71, s75, s125, s126);

  result.raw = result.scores;
  double biggest = 0.0;
  for (double s : result.scores) biggest = std::max(biggest, s);
  if (biggest > 0.0)
    for (double& s : result.scores) s /= biggest;
  return result;
}

// ---------------------------------------------------------------------------
// Triangle counting (ordered merge)

std::uint64_t run_tc(const Graph& g, TraceSink& sink) {
  if (g.directed()) throw UsageError("tc: requires an undirected graph");
  std::uint16_t s58 = sink.declare_site(Kernel::tc, 58);
  std::uint16_t s62 = sink.declare_site(Kernel::tc, 62);
  std::uint16_t s64 = sink.declare_site(Kernel::tc, 64);

  std::uint64_t total = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto u_neigh = g.out_neigh(u);
    for (NodeId v : u_neigh) {
      bool past_u = v > u;
      sink.emit(s58, past_u);
      if (!past_u) continue;
      auto it = u_neigh.begin();
      for (NodeId w : g.out_neigh(v)) {
        bool past_v = w > v;
        sink.emit(s62, past_v);
        if (!past_v) continue;
        while (it != u_neigh.end()) {
          bool behind = *it < w;
          sink.emit(s64, behind);
          if (!behind) break;
          ++it;
        }
        if (it != u_neigh.end() && *it == w) ++total;
      }
    }
  }
  return total;
}

}  // namespace branchlab
