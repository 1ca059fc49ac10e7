#include "branchlab/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "branchlab/errors.hpp"
#include "branchlab/rng.hpp"

namespace branchlab {

namespace {

bool parse_i64(std::string_view tok, std::int64_t& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

EdgeList read_edge_list(std::istream& in, bool directed) {
  EdgeList el;
  el.directed = directed;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    auto first_nonspace = sv.find_first_not_of(" \t");
    if (first_nonspace == std::string_view::npos) continue;
    if (sv[first_nonspace] == '#') continue;

    std::int64_t vals[2];
    int nvals = 0;
    std::size_t pos = 0;
    while (pos < sv.size()) {
      auto start = sv.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      auto end = sv.find_first_of(" \t", start);
      if (end == std::string_view::npos) end = sv.size();
      std::string_view tok = sv.substr(start, end - start);
      if (nvals >= 2 || !parse_i64(tok, vals[nvals]))
        throw FormatError("edge list: malformed line " + std::to_string(line_no) +
                          ": '" + line + "'");
      ++nvals;
      pos = end;
    }
    if (nvals != 2)
      throw FormatError("edge list: malformed line " + std::to_string(line_no) +
                        ": expected two vertex ids");
    if (vals[0] < 0 || vals[1] < 0)
      throw FormatError("edge list: negative vertex id at line " + std::to_string(line_no));
    el.edges.push_back({vals[0], vals[1]});
  }
  return el;
}

EdgeList read_edge_list_file(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file: " + path);
  return read_edge_list(in, directed);
}

void write_edge_list(const EdgeList& el, std::ostream& out) {
  for (const RawEdge& e : el.edges)
    out << e.src << ' ' << e.dst << '\n';
}

void write_edge_list_file(const EdgeList& el, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + path);
  write_edge_list(el, out);
  if (!out.flush()) throw IoError("write failed: " + path);
}

Graph Graph::build(const EdgeList& el) {
  // Densify: ids are ranked by ascending raw id over everything that appears
  // in the input (self loops included, so loop-only vertices survive as
  // isolated nodes).
  std::vector<std::int64_t> ids;
  ids.reserve(el.edges.size() * 2);
  for (const RawEdge& e : el.edges) {
    ids.push_back(e.src);
    ids.push_back(e.dst);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() > static_cast<std::size_t>(std::numeric_limits<NodeId>::max()))
    throw FormatError("graph too large: vertex count exceeds node id range");

  auto dense = [&ids](std::int64_t raw) -> NodeId {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), raw) - ids.begin());
  };

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(el.edges.size() * (el.directed ? 1 : 2));
  for (const RawEdge& e : el.edges) {
    NodeId s = dense(e.src), d = dense(e.dst);
    if (s == d) continue;  // self loops dropped
    edges.emplace_back(s, d);
    if (!el.directed) edges.emplace_back(d, s);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.num_nodes_ = static_cast<NodeId>(ids.size());
  g.directed_ = el.directed;
  g.original_ids_ = std::move(ids);

  const NodeId n = g.num_nodes_;
  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (auto [s, d] : edges) {
    ++g.out_offsets_[s + 1];
    ++g.in_offsets_[d + 1];
  }
  for (NodeId u = 0; u < n; ++u) {
    g.out_offsets_[u + 1] += g.out_offsets_[u];
    g.in_offsets_[u + 1] += g.in_offsets_[u];
  }
  g.out_targets_.resize(edges.size());
  g.in_targets_.resize(edges.size());
  std::vector<std::int64_t> in_fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  std::int64_t slot = 0;
  for (auto [s, d] : edges) {
    g.out_targets_[slot++] = d;      // edges sorted by (src, dst): targets ascending
    g.in_targets_[in_fill[d]++] = s; // appended in ascending src order
  }
  g.check();
  return g;
}

std::span<const NodeId> Graph::out_neigh(NodeId u, std::int64_t start) const {
  std::int64_t b = out_offsets_[u], e = out_offsets_[u + 1];
  b = std::min(b + start, e);
  return {out_targets_.data() + b, static_cast<std::size_t>(e - b)};
}

std::span<const NodeId> Graph::in_neigh(NodeId u) const {
  std::int64_t b = in_offsets_[u], e = in_offsets_[u + 1];
  return {in_targets_.data() + b, static_cast<std::size_t>(e - b)};
}

void Graph::check() const {
  auto fail = [](const char* what) { throw std::logic_error(std::string("graph invariant: ") + what); };
  const NodeId n = num_nodes_;
  if (out_offsets_.size() != static_cast<std::size_t>(n) + 1 ||
      in_offsets_.size() != static_cast<std::size_t>(n) + 1)
    fail("offset array size");
  if (out_offsets_[0] != 0 || in_offsets_[0] != 0) fail("offset base");
  if (out_offsets_[n] != static_cast<std::int64_t>(out_targets_.size())) fail("out offset end");
  if (in_offsets_[n] != static_cast<std::int64_t>(in_targets_.size())) fail("in offset end");
  if (out_targets_.size() != in_targets_.size()) fail("direction edge counts differ");
  if (original_ids_.size() != static_cast<std::size_t>(n)) fail("original id map size");
  for (NodeId u = 0; u < n; ++u) {
    if (out_offsets_[u] > out_offsets_[u + 1]) fail("out offsets not monotone");
    if (in_offsets_[u] > in_offsets_[u + 1]) fail("in offsets not monotone");
    NodeId prev = -1;
    for (NodeId v : out_neigh(u)) {
      if (v < 0 || v >= n) fail("out target out of range");
      if (v <= prev) fail("out targets not strictly ascending");
      if (v == u) fail("self loop present");
      prev = v;
    }
    prev = -1;
    for (NodeId v : in_neigh(u)) {
      if (v < 0 || v >= n) fail("in target out of range");
      if (v <= prev) fail("in targets not strictly ascending");
      prev = v;
    }
  }
  if (!directed_) {
    // Symmetric graphs must expose identical views in both directions.
    for (NodeId u = 0; u < n; ++u) {
      auto o = out_neigh(u);
      auto i = in_neigh(u);
      if (!std::equal(o.begin(), o.end(), i.begin(), i.end()))
        fail("undirected graph not symmetric");
    }
  }
}

EdgeList gen_uniform(std::int64_t n, std::int64_t m, std::uint64_t seed) {
  if (n < 1) throw UsageError("gen uniform: n must be >= 1");
  if (m < 0) throw UsageError("gen uniform: m must be >= 0");
  SplitMix64 rng(seed);
  EdgeList el;
  el.edges.reserve(m);
  for (std::int64_t i = 0; i < m; ++i) {
    std::int64_t s = static_cast<std::int64_t>(rng.next_below(n));
    std::int64_t d = static_cast<std::int64_t>(rng.next_below(n));
    el.edges.push_back({s, d});
  }
  return el;
}

EdgeList gen_kronecker(int scale, std::int64_t edge_factor, std::uint64_t seed) {
  if (scale < 0 || scale > 24)
    throw UsageError("gen kron: scale must be in [0, 24]");
  if (edge_factor < 0) throw UsageError("gen kron: edge factor must be >= 0");
  SplitMix64 rng(seed);
  EdgeList el;
  const std::int64_t m = edge_factor << scale;
  el.edges.reserve(m);
  for (std::int64_t i = 0; i < m; ++i) {
    std::int64_t src = 0, dst = 0;
    for (int bit = 0; bit < scale; ++bit) {
      double r = rng.next_double();
      if (r < 0.57) {
        // quadrant a: neither bit set
      } else if (r < 0.76) {
        dst |= std::int64_t{1} << bit;
      } else if (r < 0.95) {
        src |= std::int64_t{1} << bit;
      } else {
        src |= std::int64_t{1} << bit;
        dst |= std::int64_t{1} << bit;
      }
    }
    el.edges.push_back({src, dst});
  }
  return el;
}

bool Permutation::is_bijection() const {
  std::vector<char> seen(new_id_of.size(), 0);
  for (NodeId v : new_id_of) {
    if (v < 0 || static_cast<std::size_t>(v) >= new_id_of.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

namespace {

Permutation order_to_permutation(const std::vector<NodeId>& order) {
  Permutation p;
  p.new_id_of.resize(order.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    p.new_id_of[order[rank]] = static_cast<NodeId>(rank);
  return p;
}

std::vector<std::int64_t> out_degrees(const Graph& g) {
  std::vector<std::int64_t> deg(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) deg[u] = g.out_degree(u);
  return deg;
}

}  // namespace

Permutation degree_sort_order(std::span<const std::int64_t> deg) {
  std::vector<NodeId> order(deg.size());
  for (std::size_t i = 0; i < deg.size(); ++i) order[i] = static_cast<NodeId>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&deg](NodeId a, NodeId b) { return deg[a] > deg[b]; });
  return order_to_permutation(order);
}

Permutation hub_sort_order(std::span<const std::int64_t> deg) {
  const std::size_t n = deg.size();
  double mean = 0;
  for (std::int64_t d : deg) mean += static_cast<double>(d);
  if (n > 0) mean /= static_cast<double>(n);
  std::vector<NodeId> hubs, rest;
  for (std::size_t i = 0; i < n; ++i)
    (static_cast<double>(deg[i]) > mean ? hubs : rest).push_back(static_cast<NodeId>(i));
  std::stable_sort(hubs.begin(), hubs.end(),
                   [&deg](NodeId a, NodeId b) { return deg[a] > deg[b]; });
  hubs.insert(hubs.end(), rest.begin(), rest.end());
  return order_to_permutation(hubs);
}

Permutation hub_cluster_order(std::span<const std::int64_t> deg) {
  const std::size_t n = deg.size();
  double mean = 0;
  for (std::int64_t d : deg) mean += static_cast<double>(d);
  if (n > 0) mean /= static_cast<double>(n);
  std::vector<NodeId> order, rest;
  for (std::size_t i = 0; i < n; ++i)
    (static_cast<double>(deg[i]) > mean ? order : rest).push_back(static_cast<NodeId>(i));
  order.insert(order.end(), rest.begin(), rest.end());
  return order_to_permutation(order);
}

Permutation degree_sort(const Graph& g) { return degree_sort_order(out_degrees(g)); }
Permutation hub_sort(const Graph& g) { return hub_sort_order(out_degrees(g)); }
Permutation hub_cluster(const Graph& g) { return hub_cluster_order(out_degrees(g)); }

Graph apply_permutation(const Graph& g, const Permutation& p) {
  const NodeId n = g.num_nodes();
  if (p.new_id_of.size() != static_cast<std::size_t>(n) || !p.is_bijection())
    throw UsageError("apply_permutation: mapping is not a bijection over the vertex set");

  Graph out;
  out.num_nodes_ = n;
  out.directed_ = g.directed();
  out.original_ids_.resize(n);
  for (NodeId u = 0; u < n; ++u)
    out.original_ids_[p.new_id_of[u]] = g.original_ids()[u];

  out.out_offsets_.assign(n + 1, 0);
  out.in_offsets_.assign(n + 1, 0);
  for (NodeId u = 0; u < n; ++u) {
    out.out_offsets_[p.new_id_of[u] + 1] = g.out_degree(u);
    out.in_offsets_[p.new_id_of[u] + 1] = g.in_degree(u);
  }
  for (NodeId u = 0; u < n; ++u) {
    out.out_offsets_[u + 1] += out.out_offsets_[u];
    out.in_offsets_[u + 1] += out.in_offsets_[u];
  }
  out.out_targets_.resize(g.num_edges());
  out.in_targets_.resize(g.num_edges());
  for (NodeId u = 0; u < n; ++u) {
    NodeId nu = p.new_id_of[u];
    std::int64_t slot = out.out_offsets_[nu];
    for (NodeId v : g.out_neigh(u)) out.out_targets_[slot++] = p.new_id_of[v];
    std::sort(out.out_targets_.begin() + out.out_offsets_[nu], out.out_targets_.begin() + slot);
    slot = out.in_offsets_[nu];
    for (NodeId v : g.in_neigh(u)) out.in_targets_[slot++] = p.new_id_of[v];
    std::sort(out.in_targets_.begin() + out.in_offsets_[nu], out.in_targets_.begin() + slot);
  }
  out.check();
  return out;
}

EdgeList to_edge_list(const Graph& g) {
  EdgeList el;
  el.directed = g.directed();
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.out_neigh(u))
      if (g.directed() || u < v) el.edges.push_back({u, v});
  return el;
}

}  // namespace branchlab
