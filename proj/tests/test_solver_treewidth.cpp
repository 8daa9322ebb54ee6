#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "support/fixtures.hpp"

using namespace netembed;
using netembed::testing::fixture;
using netembed::testing::load_pair;

namespace {

ComputationGraph::Options cyclic() {
  ComputationGraph::Options o;
  o.allow_cycles = true;
  return o;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::SchemaError;
}

std::set<std::set<VertexId>> bag_sets(const TreeDecomposition& td) {
  std::set<std::set<VertexId>> out;
  for (const auto& b : td.bags) out.insert(std::set<VertexId>(b.begin(), b.end()));
  return out;
}

ComputationGraph zero_cg(int p, std::vector<ComputationEdge> edges, std::vector<VertexId> sources,
                         VertexId sink, int n) {
  return ComputationGraph::build(p, std::move(edges), std::move(sources), sink,
                                 ProcessingTable(p, n, 0.0), cyclic());
}

}  // namespace

TEST(Decomposition, DrawnLoopDecompositionIsValid) {
  auto f = load_pair("cycle4_network.json", "loop_computation.json", cyclic());
  auto td = load_decomposition(read_json_file(fixture("loop_decomposition.json")), f.computation.names);
  auto homes = validate_decomposition(f.computation.graph, td);
  EXPECT_EQ(td.width(), 2);
  EXPECT_EQ(homes.parent[td.root], -1);
  EXPECT_EQ(homes.order.back(), td.root);
  // every vertex and edge is charged in a bag that contains it
  for (VertexId w = 0; w < f.computation.graph.vertex_count(); ++w) {
    const auto& bag = td.bags[homes.vertex_home[w]];
    EXPECT_NE(std::find(bag.begin(), bag.end(), w), bag.end());
  }
}

TEST(Decomposition, MinFillOnLoopGraph) {
  auto f = load_pair("cycle4_network.json", "loop_computation.json", cyclic());
  auto td = min_fill_decomposition(f.computation.graph);
  validate_decomposition(f.computation.graph, td);
  EXPECT_EQ(td.width(), 2);
  auto drawn = load_decomposition(read_json_file(fixture("loop_decomposition.json")), f.computation.names);
  EXPECT_EQ(bag_sets(td), bag_sets(drawn));
}

TEST(Decomposition, TreeHasWidthOne) {
  auto f = load_pair("contention_network.json", "contention_computation.json");
  auto td = min_fill_decomposition(f.computation.graph);
  validate_decomposition(f.computation.graph, td);
  EXPECT_EQ(td.width(), 1);
  for (int p = 3; p < 30; p += 4) {
    auto cg = random_binary_tree_cg(p, 3, 2);
    EXPECT_EQ(min_fill_decomposition(cg).width(), 1);
  }
}

TEST(Decomposition, TriangleHasWidthTwo) {
  auto cg = zero_cg(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}, {0}, 2, 2);
  auto td = min_fill_decomposition(cg);
  validate_decomposition(cg, td);
  EXPECT_EQ(td.width(), 2);
  // No width-1 decomposition: any tree decomposition keeps a clique in one bag.
  TreeDecomposition pairs{{{0, 1}, {1, 2}, {0, 2}}, {{0, 1}, {1, 2}}, 0};
  EXPECT_THROW(validate_decomposition(cg, pairs), Error);
}

TEST(Decomposition, LayeredPathDecomposition) {
  auto f = load_pair("shared_adder_network.json", "shared_adder_computation.json");
  const auto& cg = f.computation.graph;
  auto td = layered_path_decomposition(infer_layering(cg), cg);
  validate_decomposition(cg, td);
  ASSERT_EQ(td.bags.size(), 3u);
  EXPECT_EQ(bag_sets(td), (std::set<std::set<VertexId>>{{0, 1, 2, 3, 4}, {3, 4, 5}, {5, 6}}));
  EXPECT_EQ(td.width(), 4);

  auto two = zero_cg(3, {{0, 2, 1}, {1, 2, 1}}, {0, 1}, 2, 3);
  auto single = layered_path_decomposition(infer_layering(two), two);
  ASSERT_EQ(single.bags.size(), 1u);
  EXPECT_EQ(single.bags[0].size(), 3u);
}

TEST(Decomposition, FullWidthLayersGiveTwoKMinusOne) {
  // sources 0,1 -> layer {2,3} fully connected -> layer {4,5} -> sink 6
  std::vector<ComputationEdge> edges;
  for (int a : {0, 1}) for (int b : {2, 3}) edges.push_back({a, b, 1});
  for (int a : {2, 3}) for (int b : {4, 5}) edges.push_back({a, b, 1});
  for (int a : {4, 5}) edges.push_back({a, 6, 1});
  auto cg = zero_cg(7, edges, {0, 1}, 6, 3);
  EXPECT_EQ(layered_path_decomposition(infer_layering(cg), cg).width(), 3);
}

TEST(Decomposition, Validation) {
  auto f = load_pair("cycle4_network.json", "loop_computation.json", cyclic());
  const auto& cg = f.computation.graph;
  auto good = load_decomposition(read_json_file(fixture("loop_decomposition.json")), f.computation.names);
  auto expect_invalid = [&](TreeDecomposition td) {
    EXPECT_EQ(kind_of([&] { validate_decomposition(cg, td); }), ErrorKind::InvalidDecomposition);
  };
  auto missing_vertex = good;
  missing_vertex.bags[4] = {4};  // drops t
  expect_invalid(missing_vertex);
  auto missing_edge = good;
  missing_edge.bags[0] = {0};  // drops s->a
  missing_edge.bags.push_back({1});
  missing_edge.tree_edges.push_back({0, 5});
  expect_invalid(missing_edge);
  auto broken_subtree = good;
  broken_subtree.bags[4].push_back(1);  // a appears in bags 0,1 and 4
  expect_invalid(broken_subtree);
  auto cycle = good;
  cycle.tree_edges.push_back({2, 4});
  expect_invalid(cycle);
  auto forest = good;
  forest.tree_edges.pop_back();
  forest.tree_edges.push_back({0, 1});
  expect_invalid(forest);
  auto bad_root = good;
  bad_root.root = 9;
  expect_invalid(bad_root);
}

TEST(MinCostTreewidth, LoopGraphMatchesOracle) {
  auto f = load_pair("cycle4_network.json", "loop_computation.json", cyclic());
  const auto& cg = f.computation.graph;
  auto drawn = load_decomposition(read_json_file(fixture("loop_decomposition.json")), f.computation.names);
  auto bf = brute_force_min_cost(cg, f.network.graph, f.dm);
  auto a = min_cost_treewidth(cg, drawn, f.network.graph, f.dm);
  auto b = min_cost_treewidth(cg, min_fill_decomposition(cg), f.network.graph, f.dm);
  EXPECT_EQ(a.cost, bf.cost);
  EXPECT_EQ(b.cost, bf.cost);
  EXPECT_EQ(embedding_cost(cg, f.dm, a.embedding), a.cost);
  // With zero processing and s,t two hops apart on the cycle, the optimum is 2.
  EXPECT_EQ(a.cost, 2.0);
}

TEST(MinCostTreewidth, SingleBagEqualsEnumeration) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = random_dag_instance(rng);
    const auto& cg = inst.computation;
    std::vector<VertexId> all(static_cast<std::size_t>(cg.vertex_count()));
    std::iota(all.begin(), all.end(), 0);
    TreeDecomposition td{{all}, {}, 0};
    auto dm = apsp(inst.network);
    ASSERT_EQ(min_cost_treewidth(cg, td, inst.network, dm).cost,
              brute_force_min_cost(cg, inst.network, dm).cost);
  }
}

TEST(MinCostTreewidth, MatchesOracleOnRandomDags) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = random_dag_instance(rng);
    const auto& cg = inst.computation;
    auto dm = apsp(inst.network);
    auto td = min_fill_decomposition(cg);
    validate_decomposition(cg, td);
    auto r = min_cost_treewidth(cg, td, inst.network, dm);
    ASSERT_EQ(r.cost, brute_force_min_cost(cg, inst.network, dm).cost) << trial;
    ASSERT_EQ(embedding_cost(cg, dm, r.embedding), r.cost);
    validate_embedding(cg, inst.network, r.embedding);
  }
}

TEST(MinCostTreewidth, AgreesWithLayeredSolver) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 50; ++trial) {
    InstanceParams prm;
    prm.intra_layer_probability = trial % 2 ? 0.4 : 0.0;
    auto inst = random_layered_instance(rng, prm);
    const auto& cg = inst.computation;
    auto dm = apsp(inst.network);
    auto td = layered_path_decomposition(*inst.layering, cg);
    ASSERT_EQ(min_cost_treewidth(cg, td, inst.network, dm).cost,
              min_cost_layered(cg, *inst.layering, inst.network, dm).cost);
  }
}

TEST(MinCostTreewidth, BudgetRejectsWideBags) {
  auto f = load_pair("shared_adder_network.json", "shared_adder_computation.json");
  const auto& cg = f.computation.graph;
  std::vector<VertexId> all{0, 1, 2, 3, 4, 5, 6};
  TreeDecomposition td{{all}, {}, 0};
  TreewidthOptions o;
  o.budget = 511;
  EXPECT_EQ(kind_of([&] { min_cost_treewidth(cg, td, f.network.graph, f.dm, o); }),
            ErrorKind::BudgetExceeded);
  o.budget = 512;
  EXPECT_EQ(min_cost_treewidth(cg, td, f.network.graph, f.dm, o).cost,
            brute_force_min_cost(cg, f.network.graph, f.dm).cost);
}
