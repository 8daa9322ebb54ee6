#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "support/fixtures.hpp"

using namespace netembed;
using netembed::testing::load_pair;
using netembed::testing::random_embedding;

namespace {

NetworkGraph reversed(const NetworkGraph& g) {
  std::vector<NetworkEdge> edges;
  for (const auto& e : g.edges()) edges.push_back({e.v, e.u, e.weight});
  std::reverse(edges.begin(), edges.end());
  return NetworkGraph::build(g.node_count(), std::move(edges), g.sources(), g.sink());
}

}  // namespace

TEST(EmbeddingCost, SharedAdderEmbeddings) {
  auto f = load_pair("shared_adder_network.json", "shared_adder_computation.json");
  const auto& cg = f.computation.graph;
  auto e1 = f.embedding("shared_adder_e1.json");
  auto e2 = f.embedding("shared_adder_e2.json");
  // Hand sums over the shortest paths; s2 reaches c through a and d.
  EXPECT_EQ(embedding_cost(cg, f.dm, e1), 32.0);
  EXPECT_EQ(embedding_cost(cg, f.dm, e2), 34.0);
  EXPECT_EQ(embedding_delay(cg, f.dm, e1).total, 14.0);
  EXPECT_EQ(embedding_delay(cg, f.dm, e2).total, 16.0);
}

TEST(EmbeddingCost, SinkProcessingAddsOne) {
  auto f = load_pair("shared_adder_network.json", "shared_adder_computation_sink_cost.json");
  const auto& cg = f.computation.graph;
  EXPECT_EQ(embedding_cost(cg, f.dm, f.embedding("shared_adder_e1.json")), 33.0);
  EXPECT_EQ(embedding_cost(cg, f.dm, f.embedding("shared_adder_e2.json")), 35.0);
  EXPECT_EQ(embedding_delay(cg, f.dm, f.embedding("shared_adder_e1.json")).total, 15.0);
  EXPECT_EQ(embedding_delay(cg, f.dm, f.embedding("shared_adder_e2.json")).total, 17.0);
}

TEST(EmbeddingDelay, PerVertexValues) {
  auto f = load_pair("shared_adder_network.json", "shared_adder_computation.json");
  auto r = embedding_delay(f.computation.graph, f.dm, f.embedding("shared_adder_e1.json"));
  auto id = [&](const char* n) { return f.computation.names.find(n); };
  EXPECT_EQ(r.per_vertex[id("w1")], 0.0);
  EXPECT_EQ(r.per_vertex[id("w4")], 11.0);  // s1-a is 10, plus 1
  EXPECT_EQ(r.per_vertex[id("w5")], 11.0);  // s3-c is 10, plus 1
  EXPECT_EQ(r.per_vertex[id("w6")], 13.0);
  EXPECT_EQ(r.per_vertex[id("w7")], 14.0);
}

TEST(EmbeddingCost, ChainHandExample) {
  // s -- m -- t, unit links, one relay vertex.
  auto net = NetworkGraph::build(3, {{0, 1, 1}, {1, 2, 2}}, {0}, 2);
  ProcessingTable xi(3, 3, 0.0);
  xi.set_row(1, 4.0);
  xi(1, 2) = 1.0;
  auto cg = ComputationGraph::build(3, {{0, 1, 2}, {1, 2, 1}}, {0}, 2, xi);
  auto dm = apsp(net);
  EXPECT_EQ(embedding_cost(cg, dm, Embedding{{0, 0, 2}}), 4.0 + 0.0 + 3.0);
  EXPECT_EQ(embedding_cost(cg, dm, Embedding{{0, 2, 2}}), 1.0 + 6.0);
  EXPECT_EQ(embedding_delay(cg, dm, Embedding{{0, 1, 2}}).total, 2.0 + 4.0 + 2.0);
}

TEST(EmbeddingCost, RejectsBadEmbeddings) {
  auto f = load_pair("shared_adder_network.json", "shared_adder_computation.json");
  const auto& cg = f.computation.graph;
  Embedding short_map{{0, 1}};
  EXPECT_THROW(embedding_cost(cg, f.dm, short_map), Error);
  auto e = f.embedding("shared_adder_e1.json");
  e.image[3] = 99;
  EXPECT_THROW(embedding_delay(cg, f.dm, e), Error);
  auto pinned = f.embedding("shared_adder_e1.json");
  pinned.image[cg.sink()] = 0;
  try {
    validate_embedding(cg, f.network.graph, pinned);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::InvalidEmbedding);
  }
}

TEST(Contention, DelayRisesFromFiveToSix) {
  auto f = load_pair("contention_network.json", "contention_computation.json");
  const auto& cg = f.computation.graph;
  auto e = f.embedding("contention_embedding.json");
  EXPECT_EQ(embedding_delay(cg, f.dm, e).total, 5.0);
  auto c = capacity_aware_delay(cg, f.network.graph, f.dm, e);
  EXPECT_EQ(c.report.total, 6.0);
  EXPECT_EQ(max_link_usage(cg, f.dm, e), 2);
  auto i = f.network.names.find("i"), j = f.network.names.find("j");
  EXPECT_EQ(link_usage_counts(cg, f.dm, e).at(std::minmax(i, j)), 2);
}

TEST(Contention, ScheduleOnSharedLink) {
  auto f = load_pair("contention_network.json", "contention_computation.json");
  auto e = f.embedding("contention_embedding.json");
  auto c = capacity_aware_delay(f.computation.graph, f.network.graph, f.dm, e);
  const int ij = *f.network.graph.link_between(f.network.names.find("i"), f.network.names.find("j"));
  std::vector<Transmission> on;
  for (const auto& t : c.schedule.transmissions) {
    if (t.link == ij) on.push_back(t);
  }
  ASSERT_EQ(on.size(), 2u);
  EXPECT_EQ(on[0].arrival, 1.0);
  EXPECT_EQ(on[0].departure, 2.0);
  EXPECT_EQ(on[1].arrival, 1.0);
  EXPECT_EQ(on[1].departure, 3.0);
}

TEST(Contention, SingleEdgeHasNoQueueing) {
  auto net = NetworkGraph::build(3, {{0, 1, 2}, {1, 2, 3}}, {0}, 2);
  auto cg = ComputationGraph::build(2, {{0, 1, 2}}, {0}, 1, ProcessingTable(2, 3, 0.0));
  auto dm = apsp(net);
  Embedding e{{0, 2}};
  EXPECT_EQ(capacity_aware_delay(cg, net, dm, e).report.total, embedding_delay(cg, dm, e).total);
  EXPECT_EQ(capacity_aware_delay(cg, net, dm, e).report.total, 10.0);
}

TEST(Contention, ScheduleInvariants) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = random_dag_instance(rng);
    auto dm = apsp(inst.network);
    auto e = random_embedding(rng, inst.computation, inst.network);
    for (bool per_direction : {false, true}) {
      auto c = capacity_aware_delay(inst.computation, inst.network, dm, e, {per_direction});
      std::map<int, std::vector<std::pair<double, double>>> busy;
      for (const auto& t : c.schedule.transmissions) {
        ASSERT_GE(t.departure, t.arrival + t.duration);
        busy[LinkSchedule::channel(t, per_direction)].emplace_back(t.departure - t.duration, t.departure);
      }
      for (auto& [ch, iv] : busy) {
        std::sort(iv.begin(), iv.end());
        for (std::size_t i = 1; i < iv.size(); ++i) ASSERT_LE(iv[i - 1].second, iv[i].first);
      }
      ASSERT_GE(c.report.total, embedding_delay(inst.computation, dm, e).total);
    }
  }
}

TEST(Properties, DelayNeverExceedsCost) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    auto inst = random_dag_instance(rng);
    auto dm = apsp(inst.network);
    auto e = random_embedding(rng, inst.computation, inst.network);
    ASSERT_LE(embedding_delay(inst.computation, dm, e).total, embedding_cost(inst.computation, dm, e));
  }
}

TEST(Properties, CostIgnoresEdgeDirection) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = random_dag_instance(rng);
    auto dm = apsp(inst.network);
    auto dm_rev = apsp(reversed(inst.network));
    auto e = random_embedding(rng, inst.computation, inst.network);
    ASSERT_EQ(embedding_cost(inst.computation, dm, e), embedding_cost(inst.computation, dm_rev, e));
    ASSERT_EQ(embedding_delay(inst.computation, dm, e).total,
              embedding_delay(inst.computation, dm_rev, e).total);
  }
}

TEST(Properties, ScalingByTwoDoublesObjectives) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = random_dag_instance(rng);
    const auto& cg = inst.computation;
    std::vector<NetworkEdge> edges;
    for (auto e : inst.network.edges()) edges.push_back({e.u, e.v, 2 * e.weight});
    auto net2 = NetworkGraph::build(inst.network.node_count(), edges, inst.network.sources(),
                                    inst.network.sink());
    ProcessingTable xi(cg.vertex_count(), cg.network_size(), 0.0);
    for (VertexId w = 0; w < cg.vertex_count(); ++w) {
      for (NodeId v = 0; v < cg.network_size(); ++v) xi(w, v) = 2 * cg.processing(w, v);
    }
    auto cg2 = ComputationGraph::build(cg.vertex_count(), cg.edges(), cg.sources(), cg.sink(), xi);
    auto dm = apsp(inst.network), dm2 = apsp(net2);
    auto e = random_embedding(rng, cg, inst.network);
    ASSERT_EQ(2 * embedding_cost(cg, dm, e), embedding_cost(cg2, dm2, e));
    ASSERT_EQ(2 * embedding_delay(cg, dm, e).total, embedding_delay(cg2, dm2, e).total);
  }
}

TEST(LinkUsage, CountsEveryHop) {
  auto f = load_pair("shared_adder_network.json", "shared_adder_computation.json");
  auto e = f.embedding("shared_adder_e1.json");
  int hops = 0;
  for (const auto& [link, count] : link_usage_counts(f.computation.graph, f.dm, e)) hops += count;
  int expected = 0;
  for (const auto& edge : f.computation.graph.edges()) {
    expected += static_cast<int>(extract_path(f.dm, e[edge.from], e[edge.to]).size()) - 1;
  }
  EXPECT_EQ(hops, expected);
  EXPECT_GE(max_link_usage(f.computation.graph, f.dm, e), 1);
}
