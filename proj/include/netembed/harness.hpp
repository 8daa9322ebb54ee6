#pragma once

// Seeded instance generators and the two experiment drivers: link usage of
// min-delay tree embeddings on random networks, and the delay gap of
// min-cost embeddings on layered graphs.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netembed/format.hpp"
#include "netembed/metrics.hpp"
#include "netembed/oracle.hpp"
#include "netembed/solver_layered.hpp"
#include "netembed/solver_tree.hpp"

namespace netembed {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the job identified by `path` under `master`; independent of the
/// order jobs run in.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t id : path) s = splitmix64(s ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  return s;
}

struct WeightModel {
  double min_weight = 1;  // integer weights drawn uniformly from [min, max]
  double max_weight = 1;
};

namespace detail {

inline double draw_integer(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  std::uniform_int_distribution<long long> d(static_cast<long long>(lo), static_cast<long long>(hi));
  return static_cast<double>(d(rng));
}

inline bool connected(int n, const std::vector<NetworkEdge>& edges) {
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int parts = n;
  for (const auto& e : edges) {
    int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --parts;
    }
  }
  return parts == 1;
}

}  // namespace detail

/// G(n, p_r) with each pair present independently, redrawn until connected.
/// Terminals are left unset (no sources, sink 0).
inline NetworkGraph random_network(int n, double p_r, std::uint64_t seed, WeightModel weights = {},
                                   int max_resamples = 1000, int* resamples = nullptr) {
  if (n < 2) fail(ErrorKind::PreconditionViolated, "random network needs n >= 2");
  if (!(p_r > 0.0 && p_r <= 1.0)) {
    fail(ErrorKind::PreconditionViolated, "edge probability must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p_r);
  for (int attempt = 0; attempt <= max_resamples; ++attempt) {
    std::vector<NetworkEdge> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (coin(rng)) edges.push_back({u, v, 0.0});
      }
    }
    if (!detail::connected(n, edges)) continue;
    for (auto& e : edges) e.weight = detail::draw_integer(rng, weights.min_weight, weights.max_weight);
    if (resamples) *resamples = attempt;
    return NetworkGraph::build(n, std::move(edges), {}, 0);
  }
  fail(ErrorKind::MaxResamplesExceeded, "no connected sample after " +
                                            std::to_string(max_resamples) + " redraws (n=" +
                                            std::to_string(n) + ", p_r=" + format_number(p_r) + ")");
}

/// Complete binary in-tree in heap order: vertex 0 is the sink, the parent of
/// h is (h-1)/2, and the leaves are the sources. Unit edge weights; every
/// non-source draws an integer processing cost per network node.
inline ComputationGraph random_binary_tree_cg(int p, std::uint64_t seed, int node_count,
                                              double xi_min = 1, double xi_max = 10) {
  if (p < 3) fail(ErrorKind::PreconditionViolated, "binary tree needs p >= 3");
  std::vector<ComputationEdge> edges;
  for (int h = 1; h < p; ++h) edges.push_back({h, (h - 1) / 2, 1.0});
  std::vector<VertexId> sources;
  for (int h = 0; h < p; ++h) {
    if (2 * h + 1 >= p) sources.push_back(h);
  }
  std::mt19937_64 rng(seed);
  ProcessingTable xi(p, node_count, 0.0);
  for (int h = 0; h < p; ++h) {
    if (2 * h + 1 >= p) continue;
    for (NodeId v = 0; v < node_count; ++v) xi(h, v) = detail::draw_integer(rng, xi_min, xi_max);
  }
  return ComputationGraph::build(p, std::move(edges), std::move(sources), 0, std::move(xi));
}

/// `count` distinct nodes in random order.
inline std::vector<NodeId> random_distinct_nodes(std::mt19937_64& rng, int n, int count) {
  std::vector<NodeId> nodes(static_cast<std::size_t>(n));
  std::iota(nodes.begin(), nodes.end(), 0);
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(nodes[i], nodes[pick(rng)]);
  }
  nodes.resize(static_cast<std::size_t>(count));
  return nodes;
}

struct Instance {
  NetworkGraph network;
  ComputationGraph computation;
  std::optional<LayeredStructure> layering;  // set by the layered generator
};

struct InstanceParams {
  int min_nodes = 2;
  int max_nodes = 6;
  double extra_edge_probability = 0.4;  // on top of a random spanning tree
  double min_link_weight = 0;
  double max_link_weight = 5;
  double min_lambda = 0;
  double max_lambda = 5;
  double min_xi = 0;
  double max_xi = 3;
  int max_vertices = 7;      // trees and DAGs
  int max_sources = 3;
  int max_layers = 4;         // layered
  int max_width = 2;          // layered
  double intra_layer_probability = 0.0;
  double dag_edge_probability = 0.4;
};

namespace detail {

inline NetworkGraph random_connected_network(std::mt19937_64& rng, int n, int terminals,
                                             const InstanceParams& prm) {
  std::vector<NetworkEdge> edges;
  std::vector<std::vector<char>> has(static_cast<std::size_t>(n), std::vector<char>(n, 0));
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    const int u = pick(rng);
    has[u][v] = has[v][u] = 1;
    edges.push_back({u, v, draw_integer(rng, prm.min_link_weight, prm.max_link_weight)});
  }
  std::bernoulli_distribution extra(prm.extra_edge_probability);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (!has[u][v] && extra(rng)) {
        edges.push_back({u, v, draw_integer(rng, prm.min_link_weight, prm.max_link_weight)});
      }
    }
  }
  auto nodes = random_distinct_nodes(rng, n, terminals);
  NodeId sink = nodes.back();
  nodes.pop_back();
  return NetworkGraph::build(n, std::move(edges), std::move(nodes), sink);
}

inline ProcessingTable random_processing(std::mt19937_64& rng, int p, int n,
                                         const std::vector<VertexId>& sources,
                                         const InstanceParams& prm) {
  ProcessingTable xi(p, n, 0.0);
  std::vector<char> is_source(static_cast<std::size_t>(p), 0);
  for (VertexId s : sources) is_source[s] = 1;
  for (VertexId w = 0; w < p; ++w) {
    if (is_source[w]) continue;
    for (NodeId v = 0; v < n; ++v) xi(w, v) = draw_integer(rng, prm.min_xi, prm.max_xi);
  }
  return xi;
}

inline int draw_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace detail

/// Random in-tree rooted at the last vertex; its leaves are the sources.
inline Instance random_tree_instance(std::mt19937_64& rng, const InstanceParams& prm = {}) {
  for (;;) {
    const int n = detail::draw_int(rng, std::max(prm.min_nodes, 2), prm.max_nodes);
    const int p = detail::draw_int(rng, 2, prm.max_vertices);
    std::vector<ComputationEdge> edges;
    std::vector<int> children(static_cast<std::size_t>(p), 0);
    for (int v = p - 2; v >= 0; --v) {
      const int parent = detail::draw_int(rng, v + 1, p - 1);
      ++children[parent];
      edges.push_back({v, parent, detail::draw_integer(rng, prm.min_lambda, prm.max_lambda)});
    }
    std::vector<VertexId> sources;
    for (int v = 0; v < p - 1; ++v) {
      if (children[v] == 0) sources.push_back(v);
    }
    if (static_cast<int>(sources.size()) > std::min(n - 1, prm.max_sources)) continue;
    auto net = detail::random_connected_network(rng, n, static_cast<int>(sources.size()) + 1, prm);
    auto xi = detail::random_processing(rng, p, n, sources, prm);
    auto cg = ComputationGraph::build(p, std::move(edges), std::move(sources), p - 1, std::move(xi));
    return {std::move(net), std::move(cg), std::nullopt};
  }
}

/// Random layered graph: layer 1 holds the sources, the last layer the sink,
/// and vertex ids increase layer by layer. Every vertex gets at least one
/// edge from the layer above and one to the layer below.
inline Instance random_layered_instance(std::mt19937_64& rng, const InstanceParams& prm = {}) {
  for (;;) {
    const int n = detail::draw_int(rng, std::max(prm.min_nodes, 2), prm.max_nodes);
    const int r = detail::draw_int(rng, 2, prm.max_layers);
    std::vector<int> width(static_cast<std::size_t>(r), 1);
    for (int l = 0; l + 1 < r; ++l) width[l] = detail::draw_int(rng, 1, prm.max_width);
    if (width[0] > std::min(n - 1, prm.max_sources)) continue;

    std::vector<std::vector<VertexId>> layers(static_cast<std::size_t>(r));
    int p = 0;
    for (int l = 0; l < r; ++l) {
      for (int i = 0; i < width[l]; ++i) layers[l].push_back(p++);
    }
    auto lambda = [&] { return detail::draw_integer(rng, prm.min_lambda, prm.max_lambda); };
    std::vector<ComputationEdge> edges;
    std::bernoulli_distribution coin(0.5);
    for (int l = 0; l + 1 < r; ++l) {
      const auto& up = layers[l];
      const auto& down = layers[l + 1];
      std::vector<std::vector<char>> pick(up.size(), std::vector<char>(down.size(), 0));
      for (std::size_t i = 0; i < up.size(); ++i) {
        for (std::size_t j = 0; j < down.size(); ++j) pick[i][j] = coin(rng);
      }
      for (std::size_t i = 0; i < up.size(); ++i) {
        if (std::none_of(pick[i].begin(), pick[i].end(), [](char c) { return c; })) {
          pick[i][detail::draw_int(rng, 0, static_cast<int>(down.size()) - 1)] = 1;
        }
      }
      for (std::size_t j = 0; j < down.size(); ++j) {
        bool any = false;
        for (std::size_t i = 0; i < up.size(); ++i) any = any || pick[i][j];
        if (!any) pick[detail::draw_int(rng, 0, static_cast<int>(up.size()) - 1)][j] = 1;
      }
      for (std::size_t i = 0; i < up.size(); ++i) {
        for (std::size_t j = 0; j < down.size(); ++j) {
          if (pick[i][j]) edges.push_back({up[i], down[j], lambda()});
        }
      }
    }
    if (prm.intra_layer_probability > 0.0) {
      std::bernoulli_distribution intra(prm.intra_layer_probability);
      for (int l = 1; l + 1 < r; ++l) {
        for (std::size_t i = 0; i < layers[l].size(); ++i) {
          for (std::size_t j = i + 1; j < layers[l].size(); ++j) {
            if (intra(rng)) edges.push_back({layers[l][i], layers[l][j], lambda()});
          }
        }
      }
    }

    std::vector<int> layer_of(static_cast<std::size_t>(p));
    for (int l = 0; l < r; ++l) {
      for (VertexId w : layers[l]) layer_of[w] = l + 1;
    }
    const std::vector<VertexId> sources = layers[0];
    auto net = detail::random_connected_network(rng, n, static_cast<int>(sources.size()) + 1, prm);
    auto xi = detail::random_processing(rng, p, n, sources, prm);
    auto cg = ComputationGraph::build(p, std::move(edges), sources, p - 1, std::move(xi));
    auto ls = LayeredStructure::from_assignment(cg, std::move(layer_of));
    return {std::move(net), std::move(cg), std::move(ls)};
  }
}

/// Random DAG: sources first, sink last, edges from lower to higher ids.
inline Instance random_dag_instance(std::mt19937_64& rng, const InstanceParams& prm = {}) {
  for (;;) {
    const int n = detail::draw_int(rng, std::max(prm.min_nodes, 2), prm.max_nodes);
    const int p = detail::draw_int(rng, 3, prm.max_vertices);
    const int k = detail::draw_int(rng, 1, std::min({p - 2, n - 1, prm.max_sources}));
    if (k < 1) continue;
    std::bernoulli_distribution coin(prm.dag_edge_probability);
    std::vector<std::vector<char>> has(static_cast<std::size_t>(p), std::vector<char>(p, 0));
    for (int u = 0; u < p; ++u) {
      for (int v = std::max(u + 1, k); v < p; ++v) has[u][v] = coin(rng);
    }
    for (int v = k; v < p; ++v) {
      bool any = false;
      for (int u = 0; u < v; ++u) any = any || has[u][v];
      if (!any) has[detail::draw_int(rng, 0, v - 1)][v] = 1;
    }
    for (int u = 0; u < p - 1; ++u) {
      bool any = false;
      for (int v = u + 1; v < p; ++v) any = any || has[u][v];
      if (!any) has[u][detail::draw_int(rng, std::max(u + 1, k), p - 1)] = 1;
    }
    std::vector<ComputationEdge> edges;
    for (int u = 0; u < p; ++u) {
      for (int v = u + 1; v < p; ++v) {
        if (has[u][v]) edges.push_back({u, v, detail::draw_integer(rng, prm.min_lambda, prm.max_lambda)});
      }
    }
    std::vector<VertexId> sources(static_cast<std::size_t>(k));
    std::iota(sources.begin(), sources.end(), 0);
    auto net = detail::random_connected_network(rng, n, k + 1, prm);
    auto xi = detail::random_processing(rng, p, n, sources, prm);
    auto cg = ComputationGraph::build(p, std::move(edges), std::move(sources), p - 1, std::move(xi));
    return {std::move(net), std::move(cg), std::nullopt};
  }
}

/// A batch of additions to a layered instance that keeps the layer count and
/// width: pendant vertices, chains of two new vertices, edges between
/// existing vertices, and new vertices with two edges. Some new vertices get
/// location-dependent processing.
struct EditBatch {
  std::vector<Edit> edits;
  std::vector<std::vector<double>> new_rows;  // processing of vertex p+i
};

inline EditBatch random_edit_batch(std::mt19937_64& rng, const Instance& inst, int max_edits = 3,
                                   const InstanceParams& prm = {}) {
  const auto& cg = inst.computation;
  const auto& ls = *inst.layering;
  const int r = ls.layer_count();
  const int n = cg.network_size();
  const int limit = ls.max_width();
  std::vector<int> width(static_cast<std::size_t>(r));
  for (int l = 0; l < r; ++l) width[l] = static_cast<int>(ls.layers[l].size());
  std::vector<std::vector<VertexId>> members = ls.layers;

  std::vector<std::vector<char>> has(static_cast<std::size_t>(cg.vertex_count()));
  auto grow = [&](int p) {
    for (auto& row : has) row.resize(static_cast<std::size_t>(p), 0);
    has.resize(static_cast<std::size_t>(p), std::vector<char>(static_cast<std::size_t>(p), 0));
  };
  grow(cg.vertex_count());
  for (const auto& e : cg.edges()) has[e.from][e.to] = 1;

  EditBatch batch;
  int next = cg.vertex_count();
  auto lambda = [&] { return detail::draw_integer(rng, prm.min_lambda, prm.max_lambda); };
  auto new_vertex = [&](int layer) {
    const VertexId w = next++;
    grow(next);
    members[layer - 1].push_back(w);
    ++width[layer - 1];
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    if (std::bernoulli_distribution(0.5)(rng)) {
      const double c = detail::draw_integer(rng, prm.min_xi, prm.max_xi);
      std::fill(row.begin(), row.end(), c);
    } else {
      for (auto& x : row) x = detail::draw_integer(rng, prm.min_xi, prm.max_xi);
    }
    batch.new_rows.push_back(std::move(row));
    return w;
  };
  auto pick_in = [&](int layer) {
    const auto& m = members[layer - 1];
    return m[detail::draw_int(rng, 0, static_cast<int>(m.size()) - 1)];
  };
  auto add = [&](VertexId u, VertexId v, int layer) {
    has[u][v] = 1;
    batch.edits.push_back({{u, v, lambda()}, layer});
  };

  const int count = detail::draw_int(rng, 1, max_edits);
  for (int attempt = 0; attempt < 20 && static_cast<int>(batch.edits.size()) < count; ++attempt) {
    const int kind = detail::draw_int(rng, 0, 3);
    if (r < 3 && kind != 2) continue;  // no free interior layer
    if (kind == 0) {
      // pendant head below an existing vertex, never in the sink layer
      const int l = detail::draw_int(rng, 1, r - 2);
      if (width[l] >= limit) continue;
      const VertexId u = pick_in(l);
      add(u, new_vertex(l + 1), l);
    } else if (kind == 1) {
      // chain of two new vertices hanging under an existing one
      const int l = detail::draw_int(rng, 1, r - 2);
      if (width[l] >= limit) continue;
      const VertexId u = pick_in(l);
      const VertexId a = new_vertex(l + 1);
      add(u, a, l);
      if (l + 1 <= r - 2 && width[l + 1] < limit) add(a, new_vertex(l + 2), l + 1);
    } else if (kind == 2) {
      const int l = detail::draw_int(rng, 1, r - 1);
      const VertexId u = pick_in(l);
      const VertexId v = pick_in(l + 1);
      if (has[u][v]) continue;
      add(u, v, l);
    } else {
      // new vertex with an edge in and an edge out
      const int l = detail::draw_int(rng, 2, r - 1);
      if (width[l - 1] >= limit) continue;
      const VertexId u = pick_in(l - 1);
      const VertexId v = pick_in(l + 1);
      const VertexId w = new_vertex(l);
      add(u, w, l - 1);
      add(w, v, l);
    }
  }
  return batch;
}

struct LinkUsageConfig {
  int n = 60;
  std::vector<double> edge_probabilities{0.05, 0.1, 0.2, 0.4, 0.8};
  int instances = 8;
  int placements = 5;
  int tree_size = 16;
  double processing_min = 1;
  double processing_max = 10;
  std::uint64_t seed = 42;
  int max_resamples = 1000;
};

struct StatsRow {
  double p_r = 0.0;
  double mean = 0.0;
  double median = 0.0;
  int trials = 0;
  int discarded = 0;
  int resamples = 0;
};

struct StatsTable {
  std::vector<StatsRow> rows;

  std::string to_csv() const {
    std::string out = "p_r,mean,median,trials\n";
    for (const auto& r : rows) {
      out += format_number(r.p_r) + "," + format_number(r.mean) + "," + format_number(r.median) +
             "," + std::to_string(r.trials) + "\n";
    }
    return out;
  }
};

struct LinkUsageTrial {
  int row = 0;
  int instance = 0;
  int placement = 0;
  int max_usage = 0;
  double delay = 0.0;
  bool consistent = true;  // solver total equals the re-evaluated delay
};

struct LinkUsageResult {
  StatsTable table;
  std::vector<LinkUsageTrial> trials;
};

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

}  // namespace detail

inline void validate_config(const LinkUsageConfig& c) {
  auto bad = [](const std::string& m) { fail(ErrorKind::SchemaError, "link-usage config: " + m); };
  if (c.n < 2) bad("n must be at least 2");
  if (c.instances < 1 || c.placements < 1) bad("instances and placements must be at least 1");
  if (c.tree_size < 3) bad("tree_size must be at least 3");
  if (c.edge_probabilities.empty()) bad("edge_probabilities is empty");
  for (double p : c.edge_probabilities) {
    if (!(p > 0.0 && p <= 1.0)) bad("edge probabilities must lie in (0, 1]");
  }
  if (c.tree_size / 2 + 1 >= c.n + 1) bad("more terminals than nodes");
}

/// Instances whose network cannot be drawn connected are dropped and counted;
/// a row that loses every instance is an error.
inline LinkUsageResult experiment_link_usage(const LinkUsageConfig& cfg) {
  validate_config(cfg);
  LinkUsageResult out;
  for (std::size_t row = 0; row < cfg.edge_probabilities.size(); ++row) {
    const double p_r = cfg.edge_probabilities[row];
    StatsRow stats;
    stats.p_r = p_r;
    std::vector<double> usage;
    for (int i = 0; i < cfg.instances; ++i) {
      int resamples = 0;
      std::optional<NetworkGraph> base;
      try {
        base = random_network(cfg.n, p_r, derive_seed(cfg.seed, {row, std::uint64_t(i), 0}), {},
                              cfg.max_resamples, &resamples);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::MaxResamplesExceeded) throw;
        stats.discarded += cfg.placements;
        stats.resamples += cfg.max_resamples;
        continue;
      }
      stats.resamples += resamples;
      const DistanceMatrix dm = apsp(*base);
      for (int j = 0; j < cfg.placements; ++j) {
        const std::uint64_t job = derive_seed(cfg.seed, {row, std::uint64_t(i), std::uint64_t(j) + 1});
        auto cg = random_binary_tree_cg(cfg.tree_size, derive_seed(job, {1}), cfg.n,
                                        cfg.processing_min, cfg.processing_max);
        std::mt19937_64 rng(derive_seed(job, {2}));
        auto nodes = random_distinct_nodes(rng, cfg.n, static_cast<int>(cg.sources().size()) + 1);
        const NodeId sink = nodes.back();
        nodes.pop_back();
        const auto net = base->with_terminals(std::move(nodes), sink);
        const auto sol = min_delay_tree(cg, net, dm);
        LinkUsageTrial t;
        t.row = static_cast<int>(row);
        t.instance = i;
        t.placement = j;
        t.max_usage = max_link_usage(cg, dm, sol.embedding);
        t.delay = sol.objective;
        t.consistent = sol.objective == sol.report.total;
        usage.push_back(t.max_usage);
        out.trials.push_back(t);
      }
    }
    if (usage.empty()) {
      fail(ErrorKind::MaxResamplesExceeded,
           "every instance at p_r=" + format_number(p_r) + " failed to connect");
    }
    stats.trials = static_cast<int>(usage.size());
    stats.mean = std::accumulate(usage.begin(), usage.end(), 0.0) / static_cast<double>(usage.size());
    stats.median = detail::median_of(usage);
    out.table.rows.push_back(stats);
  }
  return out;
}

/// Layered instances with unit link weights and unit edge weights; processing
/// drawn from {processing_min..processing_max} for non-sources.
struct K2Config {
  int instances = 100;
  int min_nodes = 3;
  int max_nodes = 5;
  int max_layers = 4;
  int max_width = 2;
  double extra_edge_probability = 0.4;
  double processing_min = 0;
  double processing_max = 1;
  std::uint64_t seed = 42;
  std::uint64_t budget = 10'000'000;
};

struct K2Record {
  int instance = 0;
  int k = 0;
  int r = 0;
  int n = 0;
  double mincost_delay = 0.0;  // delay of the min-cost embedding
  double min_delay = 0.0;
  double ratio = 1.0;
  double bound = 1.0;
  bool within = true;
};

struct K2Result {
  std::vector<K2Record> records;
  double max_ratio = 1.0;
  double mean_ratio = 1.0;
  int within = 0;

  std::string to_csv() const {
    std::string out = "instance,k,r,n,mincost_delay,min_delay,ratio,bound,within\n";
    for (const auto& x : records) {
      out += std::to_string(x.instance) + "," + std::to_string(x.k) + "," + std::to_string(x.r) +
             "," + std::to_string(x.n) + "," + format_number(x.mincost_delay) + "," +
             format_number(x.min_delay) + "," + format_number(x.ratio) + "," +
             format_number(x.bound) + "," + (x.within ? "1" : "0") + "\n";
    }
    return out;
  }
};

inline K2Result experiment_k2_gap(const K2Config& cfg) {
  if (cfg.instances < 1 || cfg.min_nodes < 2 || cfg.max_nodes < cfg.min_nodes ||
      cfg.max_layers < 2 || cfg.max_width < 1) {
    fail(ErrorKind::SchemaError, "k2-gap config: sizes out of range");
  }
  InstanceParams prm;
  prm.min_nodes = cfg.min_nodes;
  prm.max_nodes = cfg.max_nodes;
  prm.extra_edge_probability = cfg.extra_edge_probability;
  prm.min_link_weight = prm.max_link_weight = 1;
  prm.min_lambda = prm.max_lambda = 1;
  prm.min_xi = cfg.processing_min;
  prm.max_xi = cfg.processing_max;
  prm.max_layers = cfg.max_layers;
  prm.max_width = cfg.max_width;
  prm.max_sources = cfg.max_width;

  K2Result out;
  double ratio_sum = 0.0;
  for (int i = 0; i < cfg.instances; ++i) {
    std::mt19937_64 rng(derive_seed(cfg.seed, {std::uint64_t(i)}));
    const Instance inst = random_layered_instance(rng, prm);
    const DistanceMatrix dm = apsp(inst.network);
    const auto mc = min_cost_layered(inst.computation, *inst.layering, inst.network, dm);
    const auto md = brute_force_min_delay(inst.computation, inst.network, dm, {cfg.budget});
    K2Record rec;
    rec.instance = i;
    rec.k = inst.layering->max_width();
    rec.r = inst.layering->layer_count();
    rec.n = inst.network.node_count();
    rec.mincost_delay = embedding_delay(inst.computation, dm, mc.embedding).total;
    rec.min_delay = md.objective;
    rec.bound = static_cast<double>(rec.k) * rec.k;
    if (rec.min_delay > 0) {
      rec.ratio = rec.mincost_delay / rec.min_delay;
    } else {
      rec.ratio = rec.mincost_delay > 0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    rec.within = rec.mincost_delay <= rec.bound * rec.min_delay;
    out.within += rec.within;
    out.max_ratio = i == 0 ? rec.ratio : std::max(out.max_ratio, rec.ratio);
    ratio_sum += rec.ratio;
    out.records.push_back(rec);
  }
  out.mean_ratio = ratio_sum / cfg.instances;
  return out;
}

}  // namespace netembed
