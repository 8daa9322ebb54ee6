#pragma once

// Exact minimum-cost embedding of layered computation graphs by dynamic
// programming over per-layer assignment tuples, with incremental updates
// when edges and vertices are added.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "netembed/metrics.hpp"
#include "netembed/tuple_domain.hpp"

namespace netembed {

struct LayeredOptions {
  std::uint64_t budget = 50'000'000;  // max tuple pairs examined by one step
  int threads = 1;
};

/// Step j maps each assignment Y of DP layer j+1 to the best cost of layers
/// 0..j (everything charged before layer j+1) and the argmin assignment of layer j.
struct LayerTable {
  std::vector<double> best;
  std::vector<std::uint64_t> argbest;

  bool operator==(const LayerTable&) const = default;
};

/// A vertex removed from the DP and placed on its anchor's node.
struct AbsorbedVertex {
  VertexId vertex = 0;
  VertexId anchor = 0;
  double constant = 0.0;  // its location-independent processing cost

  bool operator==(const AbsorbedVertex&) const = default;
};

struct LayeredDPState {
  NetworkGraph network;
  ComputationGraph computation;
  LayeredStructure layering;
  std::vector<std::vector<VertexId>> dp_layers;  // layering minus absorbed vertices
  std::vector<LayerTable> tables;                // r - 1 steps
  std::vector<AbsorbedVertex> absorbed;          // in absorption order
  double dp_cost = 0.0;
  double cost = 0.0;
  Embedding embedding;
  int max_width = 0;  // width limit for later edits
};

struct LayeredSolution {
  Embedding embedding;
  double cost = 0.0;
  LayeredDPState state;
};

/// One added edge. `layer` is the layer of the edge's tail; a new head
/// vertex is placed one layer below it.
struct Edit {
  ComputationEdge edge;
  int layer = 1;
};

namespace detail {

struct Term {
  int a;  // position in the first tuple
  int b;  // position in the second tuple (same tuple for intra-layer terms)
  double weight;
};

struct LayerModel {
  std::vector<std::vector<VertexId>> layers;
  std::vector<AssignmentDomain> domains;
  std::vector<std::vector<Term>> intra;  // per layer
  std::vector<std::vector<Term>> inter;  // per step
};

inline LayerModel build_layer_model(const ComputationGraph& cg, const NetworkGraph& net,
                                    const LayeredStructure& ls,
                                    const std::vector<std::vector<VertexId>>& dp_layers) {
  LayerModel m;
  m.layers = dp_layers;
  const int r = static_cast<int>(dp_layers.size());
  std::vector<int> position(static_cast<std::size_t>(cg.vertex_count()), -1);
  for (const auto& layer : dp_layers) {
    std::vector<NodeId> pins;
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const VertexId w = layer[i];
      position[w] = static_cast<int>(i);
      if (cg.is_source(w)) {
        pins.push_back(net.sources()[cg.source_index(w)]);
      } else if (w == cg.sink()) {
        pins.push_back(net.sink());
      } else {
        pins.push_back(-1);
      }
    }
    m.domains.emplace_back(net.node_count(), std::move(pins));
  }
  m.intra.assign(static_cast<std::size_t>(r), {});
  m.inter.assign(static_cast<std::size_t>(std::max(r - 1, 0)), {});
  for (const auto& e : cg.edges()) {
    if (position[e.from] < 0 || position[e.to] < 0) continue;
    const int la = ls.layer_of[e.from] - 1;
    const int lb = ls.layer_of[e.to] - 1;
    Term t{position[e.from], position[e.to], e.weight};
    if (la == lb) {
      m.intra[la].push_back(t);
    } else {
      m.inter[la].push_back(t);
    }
  }
  return m;
}

inline void check_step_budget(const LayerModel& m, int from_step, std::uint64_t budget) {
  for (int j = from_step; j + 1 < static_cast<int>(m.domains.size()); ++j) {
    const std::uint64_t a = m.domains[j].size();
    const std::uint64_t b = m.domains[j + 1].size();
    if (a > budget || b > budget || (b != 0 && a > budget / b)) {
      fail(ErrorKind::BudgetExceeded,
           "layer step " + std::to_string(j + 1) + " needs " + std::to_string(a) + " x " +
               std::to_string(b) + " tuple pairs, budget is " + std::to_string(budget));
    }
  }
}

inline std::vector<NodeId> decode_all(const AssignmentDomain& d) {
  const std::size_t width = static_cast<std::size_t>(d.positions());
  std::vector<NodeId> flat(static_cast<std::size_t>(d.size()) * width);
  std::vector<NodeId> tuple;
  for (std::uint64_t i = 0; i < d.size(); ++i) {
    d.decode(i, tuple);
    std::copy(tuple.begin(), tuple.end(), flat.begin() + static_cast<std::ptrdiff_t>(i * width));
  }
  return flat;
}

/// Processing plus intra-layer cost of one tuple of layer l.
inline double layer_local_cost(const ComputationGraph& cg, const DistanceMatrix& dm,
                               const LayerModel& m, int l, const NodeId* x) {
  double c = 0.0;
  const auto& layer = m.layers[l];
  for (std::size_t i = 0; i < layer.size(); ++i) c += cg.processing(layer[i], x[i]);
  for (const auto& t : m.intra[l]) c += t.weight * dm(x[t.a], x[t.b]);
  return c;
}

inline LayerTable run_step(const ComputationGraph& cg, const DistanceMatrix& dm,
                           const LayerModel& m, int j, const LayerTable* previous, int threads) {
  const auto& dx = m.domains[j];
  const auto& dy = m.domains[j + 1];
  const std::size_t wx = static_cast<std::size_t>(dx.positions());
  const std::size_t wy = static_cast<std::size_t>(dy.positions());
  const auto xs = decode_all(dx);
  const auto ys = decode_all(dy);
  const std::size_t nx = static_cast<std::size_t>(dx.size());
  const std::size_t ny = static_cast<std::size_t>(dy.size());

  std::vector<double> base(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    base[x] = (previous ? previous->best[x] : 0.0) + layer_local_cost(cg, dm, m, j, &xs[x * wx]);
  }

  LayerTable table;
  table.best.assign(ny, 0.0);
  table.argbest.assign(ny, 0);
  const auto& terms = m.inter[j];

  auto solve = [&](std::size_t y_begin, std::size_t y_end) {
    for (std::size_t y = y_begin; y < y_end; ++y) {
      const NodeId* ty = &ys[y * wy];
      double best = std::numeric_limits<double>::infinity();
      std::uint64_t arg = 0;
      for (std::size_t x = 0; x < nx; ++x) {
        const NodeId* tx = &xs[x * wx];
        double v = base[x];
        for (const auto& t : terms) v += t.weight * dm(tx[t.a], ty[t.b]);
        if (v < best) {
          best = v;
          arg = x;
        }
      }
      table.best[y] = best;
      table.argbest[y] = arg;
    }
  };

  const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), ny);
  if (chunks <= 1) {
    solve(0, ny);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t c = 0; c < chunks; ++c) {
      pool.emplace_back(solve, ny * c / chunks, ny * (c + 1) / chunks);
    }
    for (auto& t : pool) t.join();
  }
  return table;
}

/// Recomputes steps from `from_step` on, backtracks and resolves absorbed vertices.
inline void finish_state(LayeredDPState& s, const DistanceMatrix& dm, const LayerModel& m,
                         int from_step, const LayeredOptions& opts) {
  const ComputationGraph& cg = s.computation;
  const int r = s.layering.layer_count();
  check_step_budget(m, from_step, opts.budget);
  s.tables.resize(static_cast<std::size_t>(r - 1));
  for (int j = from_step; j < r - 1; ++j) {
    s.tables[j] = run_step(cg, dm, m, j, j > 0 ? &s.tables[j - 1] : nullptr, opts.threads);
  }

  // The last layer holds only the pinned sink, so its domain has one tuple.
  const NodeId t = s.network.sink();
  s.dp_cost = s.tables[r - 2].best[0] + cg.processing(cg.sink(), t);

  s.embedding.image.assign(static_cast<std::size_t>(cg.vertex_count()), -1);
  std::uint64_t index = 0;
  std::vector<NodeId> tuple;
  for (int l = r - 1; l >= 0; --l) {
    m.domains[l].decode(index, tuple);
    for (std::size_t i = 0; i < tuple.size(); ++i) s.embedding.image[m.layers[l][i]] = tuple[i];
    if (l > 0) index = s.tables[l - 1].argbest[index];
  }
  s.cost = s.dp_cost;
  for (const auto& a : s.absorbed) s.cost += a.constant;
  for (auto it = s.absorbed.rbegin(); it != s.absorbed.rend(); ++it) {
    s.embedding.image[it->vertex] = s.embedding.image[it->anchor];
  }
}

inline bool constant_row(const ComputationGraph& cg, VertexId w) {
  auto row = cg.processing().row(w);
  return std::all_of(row.begin(), row.end(), [&](double x) { return x == row[0]; });
}

}  // namespace detail

inline LayeredSolution min_cost_layered(const ComputationGraph& cg, const LayeredStructure& ls,
                                        const NetworkGraph& net, const DistanceMatrix& dm,
                                        LayeredOptions opts = {}) {
  check_compatible(cg, net);
  LayeredDPState s;
  s.network = net;
  s.computation = cg;
  s.layering = LayeredStructure::from_assignment(cg, ls.layer_of);
  if (s.layering.layer_count() < 2) {
    fail(ErrorKind::NotLayered, "a layered graph needs at least two layers");
  }
  s.dp_layers = s.layering.layers;
  s.max_width = s.layering.max_width();
  const auto model = detail::build_layer_model(cg, net, s.layering, s.dp_layers);
  detail::finish_state(s, dm, model, 0, opts);
  return {s.embedding, s.cost, std::move(s)};
}

/// Builds the extended graph: `cg` plus the edits' edges. Vertex ids at or
/// above cg.vertex_count() are new; their processing rows come from
/// `new_rows` (row i for vertex p+i) or default to zero.
inline ComputationGraph extend_computation(const ComputationGraph& cg,
                                           const std::vector<Edit>& edits,
                                           const std::vector<std::vector<double>>& new_rows = {}) {
  const int p0 = cg.vertex_count();
  int p = p0;
  for (const auto& ed : edits) {
    if (ed.edge.from < 0 || ed.edge.to < 0) {
      fail(ErrorKind::UnknownNodeId, "edit references a negative vertex id");
    }
    p = std::max({p, ed.edge.from + 1, ed.edge.to + 1});
  }
  const int n = cg.network_size();
  ProcessingTable xi(p, n, 0.0);
  for (VertexId w = 0; w < p0; ++w) {
    for (NodeId v = 0; v < n; ++v) xi(w, v) = cg.processing(w, v);
  }
  for (std::size_t i = 0; i < new_rows.size() && p0 + static_cast<int>(i) < p; ++i) {
    if (static_cast<int>(new_rows[i].size()) != n) {
      fail(ErrorKind::InvalidProcessing, "processing row for a new vertex has the wrong length");
    }
    for (NodeId v = 0; v < n; ++v) xi(p0 + static_cast<int>(i), v) = new_rows[i][v];
  }
  auto edges = cg.edges();
  for (const auto& ed : edits) edges.push_back(ed.edge);
  ComputationGraph::Options o;
  for (VertexId s : cg.sources()) {
    for (double x : cg.processing().row(s)) o.allow_source_processing |= (x != 0.0);
  }
  return ComputationGraph::build(p, std::move(edges), cg.sources(), cg.sink(), std::move(xi), o);
}

/// Applies edge additions to a solved instance. New pendant vertices with
/// location-independent processing are placed on their neighbour's node;
/// everything else is re-solved from the earliest affected layer, reusing
/// the tables before it.
inline LayeredSolution apply_perturbations(const LayeredDPState& state,
                                           const ComputationGraph& cg2,
                                           const std::vector<Edit>& edits,
                                           const DistanceMatrix& dm, LayeredOptions opts = {}) {
  const ComputationGraph& cg = state.computation;
  const int p0 = cg.vertex_count();
  const int p = cg2.vertex_count();
  const int r = state.layering.layer_count();

  // cg2 must be exactly cg plus the edited edges.
  if (p < p0 || cg2.sources() != cg.sources() || cg2.sink() != cg.sink() ||
      cg2.network_size() != cg.network_size()) {
    fail(ErrorKind::InvalidEdit, "extended graph does not extend the solved graph");
  }
  for (VertexId w = 0; w < p0; ++w) {
    auto a = cg.processing().row(w);
    auto b = cg2.processing().row(w);
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
      fail(ErrorKind::InvalidEdit, "processing of vertex " + std::to_string(w) + " changed");
    }
  }
  {
    std::vector<ComputationEdge> expected = cg.edges();
    for (const auto& ed : edits) expected.push_back(ed.edge);
    auto key = [](const ComputationEdge& e) { return std::tuple(e.from, e.to, e.weight); };
    auto cmp = [&](const ComputationEdge& x, const ComputationEdge& y) { return key(x) < key(y); };
    std::vector<ComputationEdge> actual = cg2.edges();
    std::sort(expected.begin(), expected.end(), cmp);
    std::sort(actual.begin(), actual.end(), cmp);
    if (expected != actual) {
      fail(ErrorKind::InvalidEdit, "extended graph edges differ from the solved graph plus edits");
    }
  }

  // Place new vertices. An edit is attachable once one endpoint is known.
  std::vector<Edit> sorted = edits;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Edit& a, const Edit& b) { return a.layer < b.layer; });
  std::vector<int> layer_of = state.layering.layer_of;
  layer_of.resize(static_cast<std::size_t>(p), 0);
  std::vector<char> placed(static_cast<std::size_t>(p), 0);
  std::fill(placed.begin(), placed.begin() + p0, 1);
  std::vector<char> done(sorted.size(), 0);
  for (std::size_t remaining = sorted.size(); remaining > 0;) {
    bool progress = false;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (done[i]) continue;
      const auto& ed = sorted[i];
      if (!placed[ed.edge.from] && !placed[ed.edge.to]) continue;
      if (!placed[ed.edge.from]) {
        layer_of[ed.edge.from] = ed.layer;
        placed[ed.edge.from] = 1;
      }
      if (!placed[ed.edge.to]) {
        layer_of[ed.edge.to] = ed.layer + 1;
        placed[ed.edge.to] = 1;
      }
      done[i] = 1;
      --remaining;
      progress = true;
    }
    if (!progress) {
      fail(ErrorKind::DanglingEdit, "edit " + std::to_string(sorted[0].edge.from) +
                                        "->" + std::to_string(sorted[0].edge.to) +
                                        " joins two new vertices with no path to the graph");
    }
  }
  for (VertexId w = p0; w < p; ++w) {
    if (!placed[w]) fail(ErrorKind::InvalidEdit, "new vertex " + std::to_string(w) + " has no edge");
  }
  for (const auto& ed : sorted) {
    if (layer_of[ed.edge.from] != ed.layer) {
      fail(ErrorKind::InvalidEdit, "edit " + detail::edge_label(ed.edge.from, ed.edge.to) +
                                       " names layer " + std::to_string(ed.layer) +
                                       " but its tail is in layer " +
                                       std::to_string(layer_of[ed.edge.from]));
    }
  }

  LayeredDPState s;
  s.network = state.network;
  s.computation = cg2;
  s.layering = LayeredStructure::from_assignment(cg2, layer_of);
  if (s.layering.layer_count() != r) {
    fail(ErrorKind::NotLayered, "edits change the number of layers from " + std::to_string(r) +
                                    " to " + std::to_string(s.layering.layer_count()));
  }
  if (s.layering.max_width() > state.max_width) {
    fail(ErrorKind::WidthExceeded, "edits widen a layer to " +
                                       std::to_string(s.layering.max_width()) + ", limit is " +
                                       std::to_string(state.max_width));
  }
  s.max_width = state.max_width;

  // Leaf pruning over new and previously absorbed vertices.
  std::vector<std::vector<VertexId>> nbrs(static_cast<std::size_t>(p));
  for (const auto& e : cg2.edges()) {
    nbrs[e.from].push_back(e.to);
    nbrs[e.to].push_back(e.from);
  }
  for (auto& v : nbrs) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  std::vector<VertexId> candidates;
  for (VertexId w = p0; w < p; ++w) candidates.push_back(w);
  for (const auto& a : state.absorbed) candidates.push_back(a.vertex);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<char> absorbed(static_cast<std::size_t>(p), 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (VertexId w : candidates) {
      if (absorbed[w] || cg2.is_source(w) || w == cg2.sink() || !detail::constant_row(cg2, w)) {
        continue;
      }
      VertexId anchor = -1;
      int live = 0;
      for (VertexId u : nbrs[w]) {
        if (!absorbed[u]) {
          ++live;
          anchor = u;
        }
      }
      if (live != 1) continue;
      absorbed[w] = 1;
      s.absorbed.push_back({w, anchor, cg2.processing(w, 0)});
      changed = true;
      break;  // restart from the smallest id
    }
  }

  s.dp_layers.assign(static_cast<std::size_t>(r), {});
  for (int l = 0; l < r; ++l) {
    for (VertexId w : s.layering.layers[l]) {
      if (!absorbed[w]) s.dp_layers[l].push_back(w);
    }
  }

  // Earliest step whose inputs changed; steps before it are reused.
  int from_step = r - 1;
  for (int l = 0; l < r; ++l) {
    if (s.dp_layers[l] != state.dp_layers[l]) from_step = std::min(from_step, std::max(l - 1, 0));
  }
  for (const auto& ed : edits) {
    if (absorbed[ed.edge.from] || absorbed[ed.edge.to]) continue;
    from_step = std::min(from_step, std::min(layer_of[ed.edge.from] - 1, r - 2));
  }
  s.tables.assign(state.tables.begin(), state.tables.begin() + std::min(from_step, r - 1));

  const auto model = detail::build_layer_model(cg2, s.network, s.layering, s.dp_layers);
  detail::finish_state(s, dm, model, from_step, opts);
  return {s.embedding, s.cost, std::move(s)};
}

/// Cost of one transition of a solved state, recomputed from scratch: the
/// local cost of tuple x at layer `step` plus the edges into tuple y. Tables
/// satisfy best[y] == previous best[x] + transition for x = argbest[y].
inline double layered_transition_cost(const LayeredDPState& s, const DistanceMatrix& dm, int step,
                                      std::uint64_t x, std::uint64_t y) {
  const auto m = detail::build_layer_model(s.computation, s.network, s.layering, s.dp_layers);
  const auto tx = m.domains[step].decode(x);
  const auto ty = m.domains[step + 1].decode(y);
  double v = detail::layer_local_cost(s.computation, dm, m, step, tx.data());
  for (const auto& t : m.inter[step]) v += t.weight * dm(tx[t.a], ty[t.b]);
  return v;
}

}  // namespace netembed
