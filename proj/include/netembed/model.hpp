#pragma once

// Graph data model: communication network, computation graph, all-pairs
// shortest paths and structural detection (trees, layered graphs).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netembed/error.hpp"

namespace netembed {

struct NetworkEdge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 0.0;  // transmission time of one unit of data
};

struct Adjacent {
  NodeId node;
  double weight;
  int link;  // index into NetworkGraph::edges()
};

namespace detail {

inline bool is_valid_weight(double w) { return std::isfinite(w) && w >= 0.0; }

inline std::string edge_label(int a, int b) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

}  // namespace detail

struct NetworkOptions {
  bool allow_sink_as_source = false;
};

/// Undirected weighted connected graph with designated sources and a sink.
/// Immutable once built; `build` enforces every structural invariant.
class NetworkGraph {
 public:
  using Options = NetworkOptions;

  NetworkGraph() = default;

  static NetworkGraph build(int node_count, std::vector<NetworkEdge> edges,
                            std::vector<NodeId> sources, NodeId sink,
                            Options options = {}) {
    if (node_count < 1) {
      fail(ErrorKind::UnknownNodeId, "network needs at least one node");
    }
    NetworkGraph g;
    g.n_ = node_count;
    g.edges_ = std::move(edges);
    g.adjacency_.assign(static_cast<std::size_t>(node_count), {});

    std::vector<std::vector<char>> seen;  // dense is fine at desk scale
    seen.assign(static_cast<std::size_t>(node_count),
                std::vector<char>(static_cast<std::size_t>(node_count), 0));
    for (std::size_t i = 0; i < g.edges_.size(); ++i) {
      const auto& e = g.edges_[i];
      if (e.u < 0 || e.u >= node_count || e.v < 0 || e.v >= node_count) {
        fail(ErrorKind::UnknownNodeId,
             "edge " + detail::edge_label(e.u, e.v) + " references a node outside [0," +
                 std::to_string(node_count) + ")");
      }
      if (e.u == e.v) {
        fail(ErrorKind::SelfLoop, "self-loop at node " + std::to_string(e.u));
      }
      if (!detail::is_valid_weight(e.weight)) {
        fail(ErrorKind::NegativeWeight,
             "edge " + detail::edge_label(e.u, e.v) + " has weight " + std::to_string(e.weight));
      }
      if (seen[e.u][e.v]) {
        fail(ErrorKind::DuplicateEdge, "edge " + detail::edge_label(e.u, e.v) + " listed twice");
      }
      seen[e.u][e.v] = seen[e.v][e.u] = 1;
      const int link = static_cast<int>(i);
      g.adjacency_[e.u].push_back({e.v, e.weight, link});
      g.adjacency_[e.v].push_back({e.u, e.weight, link});
    }
    for (auto& row : g.adjacency_) {
      std::sort(row.begin(), row.end(),
                [](const Adjacent& a, const Adjacent& b) { return a.node < b.node; });
    }
    g.assign_terminals(std::move(sources), sink, options);

    auto components = g.connected_components();
    if (components.size() > 1) {
      std::string msg = "network has " + std::to_string(components.size()) + " components:";
      for (const auto& c : components) {
        msg += " {";
        for (std::size_t i = 0; i < c.size(); ++i) {
          msg += (i ? "," : "") + std::to_string(c[i]);
        }
        msg += "}";
      }
      throw DisconnectedGraphError(msg, std::move(components));
    }
    return g;
  }

  /// Copy with a different source/sink placement.
  NetworkGraph with_terminals(std::vector<NodeId> sources, NodeId sink,
                              Options options = {}) const {
    NetworkGraph g = *this;
    g.assign_terminals(std::move(sources), sink, options);
    return g;
  }

  int node_count() const noexcept { return n_; }
  const std::vector<NetworkEdge>& edges() const noexcept { return edges_; }
  const std::vector<NodeId>& sources() const noexcept { return sources_; }
  NodeId sink() const noexcept { return sink_; }
  std::span<const Adjacent> neighbors(NodeId u) const { return adjacency_.at(u); }

  std::optional<int> link_between(NodeId u, NodeId v) const {
    for (const auto& a : adjacency_.at(u)) {
      if (a.node == v) return a.link;
    }
    return std::nullopt;
  }

  std::vector<std::vector<NodeId>> connected_components() const {
    std::vector<int> comp(static_cast<std::size_t>(n_), -1);
    std::vector<std::vector<NodeId>> out;
    for (NodeId s = 0; s < n_; ++s) {
      if (comp[s] >= 0) continue;
      const int id = static_cast<int>(out.size());
      out.emplace_back();
      std::vector<NodeId> stack{s};
      comp[s] = id;
      while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        out.back().push_back(u);
        for (const auto& a : adjacency_[u]) {
          if (comp[a.node] < 0) {
            comp[a.node] = id;
            stack.push_back(a.node);
          }
        }
      }
      std::sort(out.back().begin(), out.back().end());
    }
    return out;
  }

 private:
  void assign_terminals(std::vector<NodeId> sources, NodeId sink, const Options& options) {
    std::vector<char> used(static_cast<std::size_t>(n_), 0);
    for (NodeId s : sources) {
      if (s < 0 || s >= n_) {
        fail(ErrorKind::UnknownNodeId, "source " + std::to_string(s) + " is not a node");
      }
      if (used[s]) {
        fail(ErrorKind::InvalidTerminals, "source " + std::to_string(s) + " listed twice");
      }
      used[s] = 1;
    }
    if (sink < 0 || sink >= n_) {
      fail(ErrorKind::UnknownNodeId, "sink " + std::to_string(sink) + " is not a node");
    }
    if (used[sink] && !options.allow_sink_as_source) {
      fail(ErrorKind::InvalidTerminals, "sink " + std::to_string(sink) + " is also a source");
    }
    sources_ = std::move(sources);
    sink_ = sink;
  }

  int n_ = 0;
  std::vector<NetworkEdge> edges_;
  std::vector<std::vector<Adjacent>> adjacency_;
  std::vector<NodeId> sources_;
  NodeId sink_ = 0;
};

/// Dense processing-cost table indexed by (computation vertex, network node).
class ProcessingTable {
 public:
  ProcessingTable() = default;
  ProcessingTable(int vertices, int nodes, double fill = 0.0)
      : rows_(vertices),
        cols_(nodes),
        data_(static_cast<std::size_t>(vertices) * static_cast<std::size_t>(nodes), fill) {}

  int vertices() const noexcept { return rows_; }
  int nodes() const noexcept { return cols_; }

  double operator()(VertexId w, NodeId v) const {
    return data_[static_cast<std::size_t>(w) * cols_ + v];
  }
  double& operator()(VertexId w, NodeId v) {
    return data_[static_cast<std::size_t>(w) * cols_ + v];
  }

  std::span<const double> row(VertexId w) const {
    return {data_.data() + static_cast<std::size_t>(w) * cols_, static_cast<std::size_t>(cols_)};
  }
  void set_row(VertexId w, double value) {
    std::fill_n(data_.begin() + static_cast<std::ptrdiff_t>(w) * cols_, cols_, value);
  }

  bool operator==(const ProcessingTable&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct ComputationEdge {
  VertexId from = 0;
  VertexId to = 0;
  double weight = 1.0;  // size of the sub-function result

  bool operator==(const ComputationEdge&) const = default;
};

struct ComputationOptions {
  bool allow_cycles = false;             // only the treewidth solver accepts these
  bool allow_source_processing = false;  // sources normally cost nothing
};

/// Weighted DAG describing how the target function is computed. Sources are
/// ordered: `sources()[i]` is pinned to the i-th network source.
class ComputationGraph {
 public:
  using Options = ComputationOptions;

  ComputationGraph() = default;

  static ComputationGraph build(int vertex_count, std::vector<ComputationEdge> edges,
                                std::vector<VertexId> sources, VertexId sink,
                                ProcessingTable processing, Options options = {}) {
    if (vertex_count < 2) {
      fail(ErrorKind::UnknownNodeId, "computation graph needs a source and a sink");
    }
    ComputationGraph g;
    g.p_ = vertex_count;
    g.edges_ = std::move(edges);
    g.sources_ = std::move(sources);
    g.sink_ = sink;
    g.processing_ = std::move(processing);
    g.in_.assign(static_cast<std::size_t>(vertex_count), {});
    g.out_.assign(static_cast<std::size_t>(vertex_count), {});
    g.source_index_.assign(static_cast<std::size_t>(vertex_count), -1);

    for (std::size_t i = 0; i < g.edges_.size(); ++i) {
      const auto& e = g.edges_[i];
      if (e.from < 0 || e.from >= vertex_count || e.to < 0 || e.to >= vertex_count) {
        fail(ErrorKind::UnknownNodeId,
             "computation edge " + detail::edge_label(e.from, e.to) + " is out of range");
      }
      if (e.from == e.to) {
        fail(ErrorKind::SelfLoop, "computation self-loop at " + std::to_string(e.from));
      }
      if (!detail::is_valid_weight(e.weight)) {
        fail(ErrorKind::NegativeWeight, "computation edge " +
                                            detail::edge_label(e.from, e.to) + " has weight " +
                                            std::to_string(e.weight));
      }
      for (int j : g.out_[e.from]) {
        if (g.edges_[j].to == e.to) {
          fail(ErrorKind::DuplicateEdge,
               "computation edge " + detail::edge_label(e.from, e.to) + " listed twice");
        }
      }
      g.out_[e.from].push_back(static_cast<int>(i));
      g.in_[e.to].push_back(static_cast<int>(i));
    }

    if (g.sources_.empty()) {
      fail(ErrorKind::InvalidTerminals, "computation graph has no sources");
    }
    for (std::size_t i = 0; i < g.sources_.size(); ++i) {
      VertexId s = g.sources_[i];
      if (s < 0 || s >= vertex_count) {
        fail(ErrorKind::UnknownNodeId, "source vertex " + std::to_string(s) + " out of range");
      }
      if (g.source_index_[s] >= 0) {
        fail(ErrorKind::InvalidTerminals, "source vertex " + std::to_string(s) + " listed twice");
      }
      if (!g.in_[s].empty()) {
        fail(ErrorKind::InvalidTerminals,
             "source vertex " + std::to_string(s) + " has incoming edges");
      }
      g.source_index_[s] = static_cast<int>(i);
    }
    if (sink < 0 || sink >= vertex_count) {
      fail(ErrorKind::UnknownNodeId, "sink vertex " + std::to_string(sink) + " out of range");
    }
    if (g.source_index_[sink] >= 0) {
      fail(ErrorKind::InvalidTerminals, "sink vertex is also a source");
    }
    if (!g.out_[sink].empty()) {
      fail(ErrorKind::InvalidTerminals, "sink vertex has outgoing edges");
    }

    if (g.processing_.vertices() != vertex_count || g.processing_.nodes() < 1) {
      fail(ErrorKind::InvalidProcessing,
           "processing table must have one row per computation vertex");
    }
    for (VertexId w = 0; w < vertex_count; ++w) {
      for (double x : g.processing_.row(w)) {
        if (!detail::is_valid_weight(x)) {
          fail(ErrorKind::InvalidProcessing,
               "processing cost of vertex " + std::to_string(w) + " is negative or not finite");
        }
        if (x != 0.0 && g.source_index_[w] >= 0 && !options.allow_source_processing) {
          fail(ErrorKind::InvalidProcessing,
               "source vertex " + std::to_string(w) + " has nonzero processing cost");
        }
      }
    }

    g.acyclic_ = g.compute_topological_order(g.topo_);
    if (!g.acyclic_ && !options.allow_cycles) {
      fail(ErrorKind::CyclicGraph, "computation graph has a directed cycle");
    }
    g.collect_warnings();
    return g;
  }

  int vertex_count() const noexcept { return p_; }
  int network_size() const noexcept { return processing_.nodes(); }
  const std::vector<ComputationEdge>& edges() const noexcept { return edges_; }
  const std::vector<VertexId>& sources() const noexcept { return sources_; }
  VertexId sink() const noexcept { return sink_; }
  const ProcessingTable& processing() const noexcept { return processing_; }
  double processing(VertexId w, NodeId v) const { return processing_(w, v); }

  /// Edge indices entering / leaving a vertex.
  std::span<const int> in_edges(VertexId w) const { return in_.at(w); }
  std::span<const int> out_edges(VertexId w) const { return out_.at(w); }

  bool is_source(VertexId w) const { return source_index_.at(w) >= 0; }
  int source_index(VertexId w) const { return source_index_.at(w); }
  bool is_acyclic() const noexcept { return acyclic_; }

  /// Deterministic (smallest ready id first) topological order.
  const std::vector<VertexId>& topological_order() const {
    if (!acyclic_) fail(ErrorKind::CyclicGraph, "computation graph has a directed cycle");
    return topo_;
  }

  /// Vertices not on any source-to-sink path.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  bool compute_topological_order(std::vector<VertexId>& order) const {
    std::vector<int> indeg(static_cast<std::size_t>(p_));
    for (VertexId w = 0; w < p_; ++w) indeg[w] = static_cast<int>(in_[w].size());
    std::priority_queue<VertexId, std::vector<VertexId>, std::greater<>> ready;
    for (VertexId w = 0; w < p_; ++w) {
      if (indeg[w] == 0) ready.push(w);
    }
    order.clear();
    while (!ready.empty()) {
      VertexId w = ready.top();
      ready.pop();
      order.push_back(w);
      for (int e : out_[w]) {
        if (--indeg[edges_[e].to] == 0) ready.push(edges_[e].to);
      }
    }
    return static_cast<int>(order.size()) == p_;
  }

  void collect_warnings() {
    std::vector<char> from_source(static_cast<std::size_t>(p_), 0);
    std::vector<char> to_sink(static_cast<std::size_t>(p_), 0);
    std::vector<VertexId> stack(sources_.begin(), sources_.end());
    for (VertexId s : sources_) from_source[s] = 1;
    while (!stack.empty()) {
      VertexId w = stack.back();
      stack.pop_back();
      for (int e : out_[w]) {
        VertexId x = edges_[e].to;
        if (!from_source[x]) {
          from_source[x] = 1;
          stack.push_back(x);
        }
      }
    }
    stack = {sink_};
    to_sink[sink_] = 1;
    while (!stack.empty()) {
      VertexId w = stack.back();
      stack.pop_back();
      for (int e : in_[w]) {
        VertexId x = edges_[e].from;
        if (!to_sink[x]) {
          to_sink[x] = 1;
          stack.push_back(x);
        }
      }
    }
    for (VertexId w = 0; w < p_; ++w) {
      if (!from_source[w] || !to_sink[w]) {
        warnings_.push_back("vertex " + std::to_string(w) +
                            " does not lie on a source-to-sink path");
      }
    }
  }

  int p_ = 0;
  std::vector<ComputationEdge> edges_;
  std::vector<VertexId> sources_;
  VertexId sink_ = 0;
  ProcessingTable processing_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
  std::vector<int> source_index_;
  std::vector<VertexId> topo_;
  bool acyclic_ = true;
  std::vector<std::string> warnings_;
};

/// All-pairs shortest-path weights plus a predecessor table. For each origin
/// the stored paths form the lexicographically smallest shortest-path tree.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(int n)
      : n_(n),
        dist_(static_cast<std::size_t>(n) * n, std::numeric_limits<double>::infinity()),
        pred_(static_cast<std::size_t>(n) * n, -1) {}

  int size() const noexcept { return n_; }
  double operator()(NodeId u, NodeId v) const { return dist_[index(u, v)]; }
  double distance(NodeId u, NodeId v) const { return dist_[index(u, v)]; }
  /// Node preceding `v` on the stored path from `u` (u itself for neighbours, -1 on the diagonal).
  NodeId predecessor(NodeId u, NodeId v) const { return pred_[index(u, v)]; }

  double& distance_ref(NodeId u, NodeId v) { return dist_[index(u, v)]; }
  NodeId& predecessor_ref(NodeId u, NodeId v) { return pred_[index(u, v)]; }

 private:
  std::size_t index(NodeId u, NodeId v) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(v);
  }

  int n_ = 0;
  std::vector<double> dist_;
  std::vector<NodeId> pred_;
};

/// Dijkstra from every origin, then a depth-first walk of the tight-edge
/// subgraph visiting neighbours in increasing id. The walk discovers each node
/// along its lexicographically smallest shortest path, and those paths are
/// prefix-closed, so a predecessor table represents them.
inline DistanceMatrix apsp(const NetworkGraph& net) {
  const int n = net.node_count();
  DistanceMatrix dm(n);
  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<char> done(static_cast<std::size_t>(n));
  std::vector<char> found(static_cast<std::size_t>(n));
  using Item = std::pair<double, NodeId>;

  for (NodeId origin = 0; origin < n; ++origin) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(done.begin(), done.end(), 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[origin] = 0.0;
    heap.push({0.0, origin});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = 1;
      for (const auto& a : net.neighbors(u)) {
        const double cand = d + a.weight;
        if (cand < dist[a.node]) {
          dist[a.node] = cand;
          heap.push({cand, a.node});
        }
      }
    }

    std::fill(found.begin(), found.end(), 0);
    found[origin] = 1;
    struct Frame {
      NodeId node;
      std::size_t next;
    };
    std::vector<Frame> stack{{origin, 0}};
    while (!stack.empty()) {
      Frame& top = stack.back();
      auto nbrs = net.neighbors(top.node);
      if (top.next == nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const auto& a = nbrs[top.next++];
      if (!found[a.node] && dist[top.node] + a.weight == dist[a.node]) {
        found[a.node] = 1;
        dm.predecessor_ref(origin, a.node) = top.node;
        stack.push_back({a.node, 0});
      }
    }
    for (NodeId v = 0; v < n; ++v) dm.distance_ref(origin, v) = dist[v];
  }
  return dm;
}

/// Node sequence of the stored shortest path from u to v; [u] when u == v.
inline std::vector<NodeId> extract_path(const DistanceMatrix& dm, NodeId u, NodeId v) {
  std::vector<NodeId> path{v};
  while (path.back() != u) {
    NodeId prev = dm.predecessor(u, path.back());
    if (prev < 0) fail(ErrorKind::DisconnectedGraph, "no path between nodes");
    path.push_back(prev);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

/// Layer assignment of a computation graph. Layers are 1-based in
/// `layer_of`; `layers[i]` lists the vertices of layer i+1 in increasing id.
struct LayeredStructure {
  std::vector<int> layer_of;
  std::vector<std::vector<VertexId>> layers;

  int layer_count() const noexcept { return static_cast<int>(layers.size()); }
  int max_width() const noexcept {
    std::size_t k = 0;
    for (const auto& l : layers) k = std::max(k, l.size());
    return static_cast<int>(k);
  }

  /// Validates an explicit assignment. Edges may stay inside a layer or step
  /// to the next one; sources sit in layer 1 and the sink alone in the last.
  static LayeredStructure from_assignment(const ComputationGraph& cg, std::vector<int> layer_of) {
    const int p = cg.vertex_count();
    if (static_cast<int>(layer_of.size()) != p) {
      fail(ErrorKind::NotLayered, "layer assignment must cover every vertex");
    }
    int r = 0;
    for (int l : layer_of) {
      if (l < 1) fail(ErrorKind::NotLayered, "layers are numbered from 1");
      if (l > p) fail(ErrorKind::NotLayered, "layer " + std::to_string(l) + " must be empty");
      r = std::max(r, l);
    }
    LayeredStructure ls;
    ls.layer_of = std::move(layer_of);
    ls.layers.assign(static_cast<std::size_t>(r), {});
    for (VertexId w = 0; w < p; ++w) ls.layers[ls.layer_of[w] - 1].push_back(w);
    for (int l = 0; l < r; ++l) {
      if (ls.layers[l].empty()) {
        fail(ErrorKind::NotLayered, "layer " + std::to_string(l + 1) + " is empty");
      }
    }
    for (const auto& e : cg.edges()) {
      const int a = ls.layer_of[e.from];
      const int b = ls.layer_of[e.to];
      if (b != a && b != a + 1) {
        fail(ErrorKind::NotLayered, "edge " + detail::edge_label(e.from, e.to) +
                                        " goes from layer " + std::to_string(a) + " to layer " +
                                        std::to_string(b));
      }
    }
    for (VertexId s : cg.sources()) {
      if (ls.layer_of[s] != 1) {
        fail(ErrorKind::NotLayered, "source " + std::to_string(s) + " is not in layer 1");
      }
    }
    if (ls.layer_of[cg.sink()] != r || ls.layers[r - 1].size() != 1) {
      fail(ErrorKind::SinkNotLast, "sink must be alone in the last layer");
    }
    return ls;
  }
};

/// Longest-path layering. Every edge must step exactly one layer; when every
/// vertex is reachable from a source such a labelling is unique, so any edge
/// spanning two or more layers means the graph is not layered.
inline LayeredStructure infer_layering(const ComputationGraph& cg) {
  if (!cg.is_acyclic()) fail(ErrorKind::NotLayered, "a cyclic graph has no layering");
  std::vector<int> layer(static_cast<std::size_t>(cg.vertex_count()), 1);
  for (VertexId w : cg.topological_order()) {
    for (int e : cg.in_edges(w)) {
      layer[w] = std::max(layer[w], layer[cg.edges()[e].from] + 1);
    }
  }
  for (const auto& e : cg.edges()) {
    if (layer[e.to] != layer[e.from] + 1) {
      fail(ErrorKind::NotLayered, "edge " + detail::edge_label(e.from, e.to) + " spans layers " +
                                      std::to_string(layer[e.from]) + " to " +
                                      std::to_string(layer[e.to]));
    }
  }
  const int r = *std::max_element(layer.begin(), layer.end());
  if (layer[cg.sink()] != r ||
      std::count(layer.begin(), layer.end(), r) != 1) {
    fail(ErrorKind::SinkNotLast, "sink is not alone in the last layer");
  }
  return LayeredStructure::from_assignment(cg, std::move(layer));
}

/// True iff the graph is an in-tree rooted at the sink.
inline bool check_tree(const ComputationGraph& cg) {
  if (!cg.is_acyclic()) return false;
  for (VertexId w = 0; w < cg.vertex_count(); ++w) {
    const std::size_t expected = (w == cg.sink()) ? 0 : 1;
    if (cg.out_edges(w).size() != expected) return false;
  }
  return true;
}

}  // namespace netembed
