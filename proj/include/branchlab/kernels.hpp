#pragma once

#include <cstdint>
#include <vector>

#include "branchlab/graph.hpp"
#include "branchlab/trace.hpp"

namespace branchlab {

// Each kernel mirrors the reference graph-benchmark implementation it was
// lifted from, with every conditional branch of interest reporting its
// outcome to the sink. Loop-continuation sites report one taken event per
// executed iteration test and one not-taken event for the failing test that
// exits the loop; a break leaves the loop without a final test, and an empty
// loop reports a single not-taken event. Short-circuit conditions report a
// single event carrying the value of the whole condition.

// Direction-optimizing BFS: top-down steps switch to bottom-up when the
// frontier's scouted edges exceed edges_to_check/alpha, and back when the
// awake count falls below num_nodes/beta. Returns the parent array
// (parent[v] = v for the source, -1 for unreached vertices).
// Sites: 52 (bottom-up unvisited test), 53 (bottom-up in-neighbor scan),
// 54 (frontier membership), 76 (top-down out-neighbor scan), 78 (top-down
// unvisited test).
struct BfsParams {
  NodeId source = 0;
  int alpha = 15;
  int beta = 18;
};
std::vector<NodeId> run_bfs(const Graph& g, const BfsParams& p, TraceSink& sink);

// Pull-style PageRank, Jacobi iteration: each sweep computes
//   score'_u = (1-d)/n + d * sum_{v in in(u)} score_v / out_degree(v)
// from the previous sweep's scores, stopping when sum |delta| < tolerance or
// after max_iters sweeps. Sites: 46 (vertex sweep), 48 (in-neighbor scan).
struct PageRankParams {
  double damping = 0.85;
  int max_iters = 20;
  double tolerance = 1e-4;
};
std::vector<double> run_pagerank(const Graph& g, const PageRankParams& p, TraceSink& sink);

// Afforest connected components: neighbor_rounds sampling rounds linking
// each vertex to its r-th out-neighbor, component compression, then a final
// pass that skips the most frequent component. Directed graphs link along
// both directions in the final pass. Returns component labels.
// Sites: 45 (link loop), 50 (link parent test), 63 (compress loop),
// 137 (final-pass out-neighbor scan), 141 (final-pass in-neighbor scan;
// declared but silent on undirected graphs).
struct CcParams {
  int neighbor_rounds = 2;
};
std::vector<NodeId> run_cc(const Graph& g, const CcParams& p, TraceSink& sink);

// Brandes betweenness centrality over a sampled (or exhaustive) source set.
// Forward phase records shortest-path counts and per-edge successor bits;
// backward phase accumulates dependencies level by level. A source does not
// accumulate its own dependency. `scores` are normalized by the maximum,
// `raw` holds the pre-normalization values.
// Sites: 70 (forward out-neighbor scan), 71 (undiscovered test),
// 75 (same-depth successor test), 125 (backward out-neighbor scan),
// 126 (successor-bit test).
struct BcParams {
  int num_sources = 16;
  std::uint64_t seed = 1;
  bool all_sources = false;
};
struct BcResult {
  std::vector<double> scores;
  std::vector<double> raw;
};
BcResult run_bc(const Graph& g, const BcParams& p, TraceSink& sink);

// Ordered triangle counting on an undirected graph (UsageError otherwise):
// for each edge (u, v) with v > u, merge-scans u's and v's neighbor lists
// over targets w > v so each triangle u < v < w is found exactly once.
// Sites: 58 (v > u filter), 62 (w > v filter), 64 (merge advance).
std::uint64_t run_tc(const Graph& g, TraceSink& sink);

}  // namespace branchlab
