#pragma once

// Embedding evaluation: total cost, critical-path delay and contention-aware
// delay on finite-capacity links.

#include <algorithm>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "netembed/model.hpp"

namespace netembed {

/// Total map from computation vertices to network nodes.
struct Embedding {
  std::vector<NodeId> image;

  NodeId operator[](VertexId w) const { return image[w]; }
  int size() const noexcept { return static_cast<int>(image.size()); }
  bool operator==(const Embedding&) const = default;
};

struct DelayReport {
  std::vector<double> per_vertex;
  double total = 0.0;
};

struct CostResult {
  Embedding embedding;
  double cost = 0.0;
};

struct DelayResult {
  Embedding embedding;
  DelayReport report;
  double objective = 0.0;  // value computed by the solver itself
};

/// Checks that the network and computation graph describe the same terminals.
inline void check_compatible(const ComputationGraph& cg, const NetworkGraph& net) {
  if (cg.network_size() != net.node_count()) {
    fail(ErrorKind::InvalidProcessing,
         "processing table has " + std::to_string(cg.network_size()) + " columns, network has " +
             std::to_string(net.node_count()) + " nodes");
  }
  if (cg.sources().size() != net.sources().size()) {
    fail(ErrorKind::InvalidTerminals,
         "computation graph has " + std::to_string(cg.sources().size()) +
             " sources, network has " + std::to_string(net.sources().size()));
  }
}

/// Range check: one image per vertex, each a valid node.
inline void check_embedding_shape(const ComputationGraph& cg, int node_count, const Embedding& e) {
  if (e.size() != cg.vertex_count()) {
    fail(ErrorKind::InvalidEmbedding, "embedding maps " + std::to_string(e.size()) +
                                          " vertices, graph has " +
                                          std::to_string(cg.vertex_count()));
  }
  for (VertexId w = 0; w < e.size(); ++w) {
    if (e[w] < 0 || e[w] >= node_count) {
      fail(ErrorKind::InvalidEmbedding,
           "vertex " + std::to_string(w) + " maps to unknown node " + std::to_string(e[w]));
    }
  }
}

/// Full check, including the source and sink pins.
inline void validate_embedding(const ComputationGraph& cg, const NetworkGraph& net,
                               const Embedding& e) {
  check_compatible(cg, net);
  check_embedding_shape(cg, net.node_count(), e);
  for (std::size_t i = 0; i < cg.sources().size(); ++i) {
    if (e[cg.sources()[i]] != net.sources()[i]) {
      fail(ErrorKind::InvalidEmbedding,
           "source vertex " + std::to_string(cg.sources()[i]) + " must map to node " +
               std::to_string(net.sources()[i]));
    }
  }
  if (e[cg.sink()] != net.sink()) {
    fail(ErrorKind::InvalidEmbedding, "sink vertex must map to node " + std::to_string(net.sink()));
  }
}

inline double embedding_cost(const ComputationGraph& cg, const DistanceMatrix& dm,
                             const Embedding& e) {
  check_embedding_shape(cg, dm.size(), e);
  double total = 0.0;
  for (VertexId w = 0; w < cg.vertex_count(); ++w) total += cg.processing(w, e[w]);
  for (const auto& edge : cg.edges()) total += edge.weight * dm(e[edge.from], e[edge.to]);
  return total;
}

inline DelayReport embedding_delay(const ComputationGraph& cg, const DistanceMatrix& dm,
                                   const Embedding& e) {
  check_embedding_shape(cg, dm.size(), e);
  DelayReport report;
  report.per_vertex.assign(static_cast<std::size_t>(cg.vertex_count()), 0.0);
  for (VertexId w : cg.topological_order()) {
    if (cg.is_source(w)) continue;
    double arrival = 0.0;
    for (int id : cg.in_edges(w)) {
      const auto& edge = cg.edges()[id];
      arrival = std::max(arrival, report.per_vertex[edge.from] +
                                      edge.weight * dm(e[edge.from], e[w]));
    }
    report.per_vertex[w] = arrival + cg.processing(w, e[w]);
  }
  report.total = report.per_vertex[cg.sink()];
  return report;
}

struct ContentionOptions {
  bool per_direction = false;  // give each link direction its own queue
};

struct Transmission {
  int link = 0;
  NodeId from = 0;
  NodeId to = 0;
  int edge = 0;  // computation edge id
  double arrival = 0.0;
  double departure = 0.0;
  double duration = 0.0;
};

struct LinkSchedule {
  // In simulation order; per channel this is FIFO order.
  std::vector<Transmission> transmissions;

  /// Channel id used by the simulation for a transmission.
  static int channel(const Transmission& t, bool per_direction) {
    return per_direction ? 2 * t.link + (t.from > t.to ? 1 : 0) : t.link;
  }
};

struct ContentionResult {
  DelayReport report;
  LinkSchedule schedule;
};

/// Event-driven simulation. Each computation edge travels its stored shortest
/// path; a link sends one edge's data at a time, first come first served, and
/// needs weight(edge) * T(link) per transmission. Simultaneous arrivals are
/// ordered by (link id, edge id). A vertex starts once every inbound edge has
/// left its last link and finishes after its processing time.
inline ContentionResult capacity_aware_delay(const ComputationGraph& cg, const NetworkGraph& net,
                                             const DistanceMatrix& dm, const Embedding& e,
                                             ContentionOptions options = {}) {
  check_embedding_shape(cg, net.node_count(), e);
  const int p = cg.vertex_count();
  const auto& edges = cg.edges();

  std::vector<std::vector<NodeId>> route(edges.size());
  std::vector<std::vector<int>> route_links(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    route[i] = extract_path(dm, e[edges[i].from], e[edges[i].to]);
    for (std::size_t h = 0; h + 1 < route[i].size(); ++h) {
      route_links[i].push_back(*net.link_between(route[i][h], route[i][h + 1]));
    }
  }

  const int channels = static_cast<int>(net.edges().size()) * (options.per_direction ? 2 : 1);
  std::vector<double> channel_free(static_cast<std::size_t>(channels), 0.0);
  std::vector<int> pending(static_cast<std::size_t>(p));
  std::vector<double> ready(static_cast<std::size_t>(p), 0.0);
  for (VertexId w = 0; w < p; ++w) pending[w] = static_cast<int>(cg.in_edges(w).size());

  ContentionResult out;
  out.report.per_vertex.assign(static_cast<std::size_t>(p), 0.0);

  // (time, link, edge, hop)
  using Event = std::tuple<double, int, int, int>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::vector<std::pair<VertexId, double>> firing;  // vertices whose inputs are complete

  auto deliver = [&](int edge_id, double time) {
    const VertexId head = edges[edge_id].to;
    ready[head] = std::max(ready[head], time);
    if (--pending[head] == 0) firing.emplace_back(head, ready[head]);
  };
  auto drain = [&] {
    while (!firing.empty()) {
      auto [w, start] = firing.back();
      firing.pop_back();
      const double done = cg.is_source(w) ? start : start + cg.processing(w, e[w]);
      out.report.per_vertex[w] = done;
      for (int id : cg.out_edges(w)) {
        if (route_links[id].empty()) {
          deliver(id, done);
        } else {
          events.emplace(done, route_links[id][0], id, 0);
        }
      }
    }
  };

  for (VertexId w = 0; w < p; ++w) {
    if (pending[w] == 0) firing.emplace_back(w, 0.0);
  }
  std::reverse(firing.begin(), firing.end());  // fire smallest id first
  drain();

  while (!events.empty()) {
    auto [time, link, id, hop] = events.top();
    events.pop();
    Transmission t;
    t.link = link;
    t.from = route[id][hop];
    t.to = route[id][hop + 1];
    t.edge = id;
    t.arrival = time;
    t.duration = edges[id].weight * net.edges()[link].weight;
    double& free_at = channel_free[LinkSchedule::channel(t, options.per_direction)];
    t.departure = std::max(free_at, time) + t.duration;
    free_at = t.departure;
    out.schedule.transmissions.push_back(t);

    if (hop + 1 < static_cast<int>(route_links[id].size())) {
      events.emplace(t.departure, route_links[id][hop + 1], id, hop + 1);
    } else {
      deliver(id, t.departure);
      drain();
    }
  }
  out.report.total = out.report.per_vertex[cg.sink()];
  return out;
}

/// Number of computation edges routed over each undirected link, keyed by
/// (smaller node, larger node).
inline std::map<std::pair<NodeId, NodeId>, int> link_usage_counts(const ComputationGraph& cg,
                                                                  const DistanceMatrix& dm,
                                                                  const Embedding& e) {
  check_embedding_shape(cg, dm.size(), e);
  std::map<std::pair<NodeId, NodeId>, int> counts;
  for (const auto& edge : cg.edges()) {
    auto path = extract_path(dm, e[edge.from], e[edge.to]);
    for (std::size_t h = 0; h + 1 < path.size(); ++h) {
      ++counts[std::minmax(path[h], path[h + 1])];
    }
  }
  return counts;
}

inline int max_link_usage(const ComputationGraph& cg, const DistanceMatrix& dm,
                          const Embedding& e) {
  int best = 0;
  for (const auto& [link, count] : link_usage_counts(cg, dm, e)) best = std::max(best, count);
  return best;
}

}  // namespace netembed
