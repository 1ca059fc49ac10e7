#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace branchlab {

using NodeId = std::int32_t;

struct RawEdge {
  std::int64_t src = 0;
  std::int64_t dst = 0;
  friend bool operator==(const RawEdge&, const RawEdge&) = default;
};

struct EdgeList {
  std::vector<RawEdge> edges;
  bool directed = true;
};

// Parses two-column whitespace-separated edge lists. Lines starting with '#'
// are comments (SNAP dumps rely on this); blank lines are skipped. Anything
// else is a FormatError naming the 1-based line number.
EdgeList read_edge_list(std::istream& in, bool directed);
EdgeList read_edge_list_file(const std::string& path, bool directed);
void write_edge_list(const EdgeList& el, std::ostream& out);
void write_edge_list_file(const EdgeList& el, const std::string& path);

// Immutable CSR graph with both adjacency directions. Construction densifies
// vertex ids (dense ids 0..n-1 assigned by ascending raw id over the ids that
// appear in the input edges), drops self loops, symmetrizes when the edge
// list is undirected, and de-duplicates.
class Graph {
 public:
  Graph() = default;

  static Graph build(const EdgeList& el);

  NodeId num_nodes() const { return num_nodes_; }
  // Number of stored (directed) edge slots; an undirected input edge
  // occupies two slots.
  std::int64_t num_edges() const { return static_cast<std::int64_t>(out_targets_.size()); }
  bool directed() const { return directed_; }

  std::int64_t out_degree(NodeId u) const { return out_offsets_[u + 1] - out_offsets_[u]; }
  std::int64_t in_degree(NodeId u) const { return in_offsets_[u + 1] - in_offsets_[u]; }

  // Neighbors of u, optionally skipping the first `start` entries (clamped to
  // the degree). Targets are strictly ascending.
  std::span<const NodeId> out_neigh(NodeId u, std::int64_t start = 0) const;
  std::span<const NodeId> in_neigh(NodeId u) const;

  // Global index of u's first out-edge slot; slot ids are what per-edge side
  // structures (e.g. successor bitmaps) are indexed by.
  std::int64_t out_offset(NodeId u) const { return out_offsets_[u]; }

  // Dense id -> raw id from the ingested edge list.
  const std::vector<std::int64_t>& original_ids() const { return original_ids_; }

  // CSR invariants; throws std::logic_error on violation. Run on every
  // construction path.
  void check() const;

 private:
  friend Graph apply_permutation(const Graph&, const struct Permutation&);

  NodeId num_nodes_ = 0;
  bool directed_ = true;
  std::vector<std::int64_t> out_offsets_ = {0};
  std::vector<std::int64_t> in_offsets_ = {0};
  std::vector<NodeId> out_targets_;
  std::vector<NodeId> in_targets_;
  std::vector<std::int64_t> original_ids_;
};

// Uniform-random directed edge list: m pairs drawn from [0,n)^2 with
// SplitMix64(seed). n >= 1, m >= 0.
EdgeList gen_uniform(std::int64_t n, std::int64_t m, std::uint64_t seed);

// R-MAT/Kronecker edge list with quadrant probabilities a=0.57 b=0.19 c=0.19
// d=0.05 over 2^scale vertices and edge_factor*2^scale edges. Bit k of
// (src,dst) is decided by the k-th draw. scale must be in [0, 24]; the cap
// keeps worst-case memory in check.
EdgeList gen_kronecker(int scale, std::int64_t edge_factor, std::uint64_t seed);

struct Permutation {
  std::vector<NodeId> new_id_of;  // old dense id -> new dense id
  bool is_bijection() const;
};

// The ordering rules operate on the out-degree profile alone; the *_order
// variants are exposed so the rules can be tested directly.
Permutation degree_sort_order(std::span<const std::int64_t> out_degrees);
Permutation hub_sort_order(std::span<const std::int64_t> out_degrees);
Permutation hub_cluster_order(std::span<const std::int64_t> out_degrees);

// degree_sort: descending out-degree, ties by ascending old id.
Permutation degree_sort(const Graph& g);
// hub_sort: vertices with out-degree > mean first (descending degree), the
// rest keep their relative order.
Permutation hub_sort(const Graph& g);
// hub_cluster: hubs first but in original relative order, rest follow in
// original relative order.
Permutation hub_cluster(const Graph& g);

// Relabels the graph in place of ids: new graph has edge (p[u], p[v]) for
// every edge (u, v). Rejects non-bijective mappings (UsageError).
Graph apply_permutation(const Graph& g, const Permutation& p);

// Exports a built graph back to an edge list over dense ids. Undirected
// graphs emit each edge once (u < v); re-ingesting with the same
// directedness reproduces the graph exactly.
EdgeList to_edge_list(const Graph& g);

}  // namespace branchlab
