#pragma once

#include <random>
#include <string>

#include "netembed/netembed.hpp"

namespace netembed::testing {

inline std::string fixture(const std::string& name) {
  return std::string(NETEMBED_FIXTURE_DIR) + "/" + name;
}

struct Loaded {
  NetworkDoc network;
  ComputationDoc computation;
  DistanceMatrix dm;

  Embedding embedding(const std::string& file) const {
    return load_embedding(read_json_file(fixture(file)), computation.names, network.names);
  }
};

inline Loaded load_pair(const std::string& network_file, const std::string& computation_file,
                        ComputationGraph::Options options = {}) {
  Loaded out;
  out.network = load_network(read_json_file(fixture(network_file)));
  out.computation =
      load_computation(read_json_file(fixture(computation_file)), out.network.names, options);
  out.dm = apsp(out.network.graph);
  return out;
}

/// Uniform over embeddings that respect the source and sink pins.
inline Embedding random_embedding(std::mt19937_64& rng, const ComputationGraph& cg,
                                  const NetworkGraph& net) {
  Embedding e;
  std::uniform_int_distribution<int> node(0, net.node_count() - 1);
  e.image.resize(static_cast<std::size_t>(cg.vertex_count()));
  for (auto& x : e.image) x = node(rng);
  for (std::size_t i = 0; i < cg.sources().size(); ++i) e.image[cg.sources()[i]] = net.sources()[i];
  e.image[cg.sink()] = net.sink();
  return e;
}

/// The two-rows-per-stage network and the chained combiner graph of the
/// min-cost versus min-delay gap example, with its two named embeddings.
struct GapExample {
  NetworkGraph network;
  ComputationGraph computation;
  Embedding e1;  // combiners on the u side
  Embedding e2;  // combiners on the v side
  double a = 0, eps = 0;
  int l = 0;
};

inline GapExample gap_example(double a, double eps, int l) {
  // Network rows R_0 = (s1, s2), R_1..R_{2l-1} = (u_i, v_i). A stage of
  // weights (a, 0.7a, 0.5a, 0.1a) joins R_{2j} to R_{2j+1}; complete
  // bipartite eps edges join R_{2j-1} to R_{2j}, where sources s_{2j+1} and
  // s_{2j+2} hang off u_{2j} and v_{2j} at zero weight. t hangs off the last row.
  const int rows = 2 * l - 1;
  const int sources = 2 * l;
  auto s = [&](int i) { return i - 1; };  // 1-based source index
  auto u = [&](int i) { return sources + (i - 1); };
  auto v = [&](int i) { return sources + rows + (i - 1); };
  const int t = sources + 2 * rows;
  const int n = t + 1;

  std::vector<NetworkEdge> edges;
  for (int j = 0; j < l; ++j) {
    const int left = j == 0 ? s(1) : u(2 * j);
    const int right = j == 0 ? s(2) : v(2 * j);
    edges.push_back({left, u(2 * j + 1), a});
    edges.push_back({right, v(2 * j + 1), 0.7 * a});
    edges.push_back({left, v(2 * j + 1), 0.5 * a});
    edges.push_back({right, u(2 * j + 1), 0.1 * a});
    if (j > 0) {
      edges.push_back({u(2 * j - 1), u(2 * j), eps});
      edges.push_back({u(2 * j - 1), v(2 * j), eps});
      edges.push_back({v(2 * j - 1), u(2 * j), eps});
      edges.push_back({v(2 * j - 1), v(2 * j), eps});
      edges.push_back({s(2 * j + 1), u(2 * j), 0.0});
      edges.push_back({s(2 * j + 2), v(2 * j), 0.0});
    }
  }
  edges.push_back({u(rows), t, eps});
  edges.push_back({v(rows), t, eps});
  std::vector<NodeId> net_sources;
  for (int i = 1; i <= sources; ++i) net_sources.push_back(s(i));

  // Computation: sources w_1..w_2l, combiners alpha_{3j-2}, splitters
  // alpha_{3j-1}, alpha_{3j}, then the sink.
  const int alphas = 3 * l - 2;
  auto w = [&](int i) { return i - 1; };
  auto alpha = [&](int i) { return sources + (i - 1); };
  const int sink = sources + alphas;
  const int p = sink + 1;
  std::vector<ComputationEdge> cedges{{w(1), alpha(1), 1}, {w(2), alpha(1), 1}};
  for (int j = 1; j < l; ++j) {
    cedges.push_back({alpha(3 * j - 2), alpha(3 * j - 1), 1});
    cedges.push_back({alpha(3 * j - 2), alpha(3 * j), 1});
    cedges.push_back({w(2 * j + 1), alpha(3 * j - 1), 1});
    cedges.push_back({w(2 * j + 2), alpha(3 * j), 1});
    cedges.push_back({alpha(3 * j - 1), alpha(3 * j + 1), 1});
    cedges.push_back({alpha(3 * j), alpha(3 * j + 1), 1});
  }
  cedges.push_back({alpha(alphas), sink, 1});
  std::vector<VertexId> csources;
  for (int i = 1; i <= sources; ++i) csources.push_back(w(i));
  ProcessingTable xi(p, n, 0.0);
  for (int x = sources; x < p; ++x) xi.set_row(x, 1.0);

  GapExample g;
  g.a = a;
  g.eps = eps;
  g.l = l;
  g.network = NetworkGraph::build(n, std::move(edges), std::move(net_sources), t);
  g.computation = ComputationGraph::build(p, std::move(cedges), std::move(csources), sink, std::move(xi));
  g.e1.image.assign(static_cast<std::size_t>(p), t);
  for (int i = 1; i <= sources; ++i) g.e1.image[w(i)] = s(i);
  g.e2 = g.e1;
  for (int j = 1; j <= l; ++j) {
    g.e1.image[alpha(3 * j - 2)] = u(2 * j - 1);
    g.e2.image[alpha(3 * j - 2)] = v(2 * j - 1);
    if (j < l) {
      for (Embedding* e : {&g.e1, &g.e2}) {
        e->image[alpha(3 * j - 1)] = u(2 * j);
        e->image[alpha(3 * j)] = v(2 * j);
      }
    }
  }
  return g;
}

}  // namespace netembed::testing
