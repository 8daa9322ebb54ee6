#pragma once

// Exact minimum-delay embedding for in-tree computation graphs, and the
// zero-processing fast path that places everything on the sink.

#include <algorithm>
#include <limits>
#include <vector>

#include "netembed/metrics.hpp"

namespace netembed {

namespace detail {

inline Embedding pinned_embedding(const ComputationGraph& cg, const NetworkGraph& net,
                                  NodeId fill) {
  Embedding e;
  e.image.assign(static_cast<std::size_t>(cg.vertex_count()), fill);
  for (std::size_t i = 0; i < cg.sources().size(); ++i) e.image[cg.sources()[i]] = net.sources()[i];
  e.image[cg.sink()] = net.sink();
  return e;
}

}  // namespace detail

/// h[l][v]: best delay of the subtree rooted at l, including shipping l's
/// result to node v. x[l][v]: the image of l that attains it.
inline DelayResult min_delay_tree(const ComputationGraph& cg, const NetworkGraph& net,
                                  const DistanceMatrix& dm) {
  if (!check_tree(cg)) {
    fail(ErrorKind::NotATree, "every non-sink vertex needs exactly one successor");
  }
  check_compatible(cg, net);
  const int n = net.node_count();
  const int p = cg.vertex_count();
  const auto& order = cg.topological_order();
  const auto& edges = cg.edges();

  std::vector<std::vector<double>> h(static_cast<std::size_t>(p));
  std::vector<std::vector<NodeId>> x(static_cast<std::size_t>(p));
  std::vector<double> ready(static_cast<std::size_t>(n));

  auto gather = [&](VertexId l) {
    std::fill(ready.begin(), ready.end(), 0.0);
    for (int id : cg.in_edges(l)) {
      const auto& hi = h[edges[id].from];
      for (NodeId u = 0; u < n; ++u) ready[u] = std::max(ready[u], hi[u]);
    }
  };

  for (VertexId l : order) {
    if (l == cg.sink()) continue;
    const double lambda = edges[cg.out_edges(l)[0]].weight;
    h[l].assign(static_cast<std::size_t>(n), 0.0);
    x[l].assign(static_cast<std::size_t>(n), 0);
    if (cg.is_source(l)) {
      const NodeId s = net.sources()[cg.source_index(l)];
      for (NodeId v = 0; v < n; ++v) {
        h[l][v] = lambda * dm(s, v);
        x[l][v] = s;
      }
      continue;
    }
    gather(l);
    for (NodeId u = 0; u < n; ++u) ready[u] += cg.processing(l, u);
    for (NodeId v = 0; v < n; ++v) {
      double best = std::numeric_limits<double>::infinity();
      NodeId arg = 0;
      for (NodeId u = 0; u < n; ++u) {
        const double c = ready[u] + lambda * dm(u, v);
        if (c < best) {
          best = c;
          arg = u;
        }
      }
      h[l][v] = best;
      x[l][v] = arg;
    }
  }

  const NodeId t = net.sink();
  gather(cg.sink());
  const double total = ready[t] + cg.processing(cg.sink(), t);

  Embedding e;
  e.image.assign(static_cast<std::size_t>(p), t);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId l = *it;
    if (l == cg.sink()) continue;
    const VertexId succ = edges[cg.out_edges(l)[0]].to;
    e.image[l] = x[l][e.image[succ]];
  }

  DelayResult out;
  out.embedding = std::move(e);
  out.report = embedding_delay(cg, dm, out.embedding);
  out.objective = total;
  return out;
}

/// Requires zero processing everywhere and unit edge weights. The delay is
/// then at least the farthest source's distance to the sink, which this
/// embedding attains.
inline DelayResult min_delay_collapse(const ComputationGraph& cg, const NetworkGraph& net,
                                      const DistanceMatrix& dm) {
  check_compatible(cg, net);
  for (VertexId w = 0; w < cg.vertex_count(); ++w) {
    for (double xi : cg.processing().row(w)) {
      if (xi != 0.0) {
        fail(ErrorKind::PreconditionViolated,
             "vertex " + std::to_string(w) + " has nonzero processing cost");
      }
    }
  }
  for (const auto& edge : cg.edges()) {
    if (edge.weight != 1.0) {
      fail(ErrorKind::PreconditionViolated, "edge " + detail::edge_label(edge.from, edge.to) +
                                                " has weight other than 1");
    }
  }
  DelayResult out;
  out.embedding = detail::pinned_embedding(cg, net, net.sink());
  out.report = embedding_delay(cg, dm, out.embedding);
  for (NodeId s : net.sources()) out.objective = std::max(out.objective, dm(s, net.sink()));
  return out;
}

}  // namespace netembed
