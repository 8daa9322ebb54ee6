#pragma once

// Minimum-cost embedding by dynamic programming over a tree decomposition of
// the (undirected) computation graph.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netembed/metrics.hpp"
#include "netembed/tuple_domain.hpp"

namespace netembed {

struct TreeDecomposition {
  std::vector<std::vector<VertexId>> bags;
  std::vector<std::pair<int, int>> tree_edges;
  int root = 0;

  int width() const noexcept {
    std::size_t w = 0;
    for (const auto& b : bags) w = std::max(w, b.size());
    return static_cast<int>(w) - 1;
  }
};

/// Where each vertex and edge is charged: the bag closest to the root that
/// contains it. `order` lists bags children-first.
struct DecompositionHomes {
  std::vector<int> vertex_home;
  std::vector<int> edge_home;
  std::vector<int> parent;  // -1 at the root
  std::vector<int> order;
};

inline DecompositionHomes validate_decomposition(const ComputationGraph& cg,
                                                 const TreeDecomposition& td) {
  auto bad = [](const std::string& msg) { fail(ErrorKind::InvalidDecomposition, msg); };
  const int p = cg.vertex_count();
  const int b = static_cast<int>(td.bags.size());
  if (b == 0) bad("decomposition has no bags");
  if (td.root < 0 || td.root >= b) bad("root bag " + std::to_string(td.root) + " out of range");
  if (static_cast<int>(td.tree_edges.size()) != b - 1) {
    bad("a tree on " + std::to_string(b) + " bags needs " + std::to_string(b - 1) + " edges");
  }

  std::vector<std::vector<char>> member(static_cast<std::size_t>(b),
                                        std::vector<char>(static_cast<std::size_t>(p), 0));
  std::vector<int> occurrences(static_cast<std::size_t>(p), 0);
  for (int i = 0; i < b; ++i) {
    for (VertexId w : td.bags[i]) {
      if (w < 0 || w >= p) bad("bag " + std::to_string(i) + " names unknown vertex");
      if (member[i][w]) bad("bag " + std::to_string(i) + " repeats a vertex");
      member[i][w] = 1;
      ++occurrences[w];
    }
  }
  for (VertexId w = 0; w < p; ++w) {
    if (occurrences[w] == 0) bad("vertex " + std::to_string(w) + " is in no bag");
  }

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(b));
  std::vector<int> shared(static_cast<std::size_t>(p), 0);
  for (const auto& [x, y] : td.tree_edges) {
    if (x < 0 || x >= b || y < 0 || y >= b || x == y) bad("tree edge out of range");
    adj[x].push_back(y);
    adj[y].push_back(x);
    for (VertexId w = 0; w < p; ++w) shared[w] += member[x][w] && member[y][w];
  }

  DecompositionHomes h;
  h.parent.assign(static_cast<std::size_t>(b), -1);
  std::vector<int> depth(static_cast<std::size_t>(b), -1);
  std::vector<int> bfs{td.root};
  depth[td.root] = 0;
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    const int x = bfs[i];
    for (int y : adj[x]) {
      if (depth[y] >= 0) continue;
      depth[y] = depth[x] + 1;
      h.parent[y] = x;
      bfs.push_back(y);
    }
  }
  if (static_cast<int>(bfs.size()) != b) bad("decomposition tree is not connected");
  h.order.assign(bfs.rbegin(), bfs.rend());

  // In a tree, the bags holding w are connected iff they span occurrences-1 edges.
  for (VertexId w = 0; w < p; ++w) {
    if (shared[w] != occurrences[w] - 1) {
      bad("bags containing vertex " + std::to_string(w) + " are not connected");
    }
  }

  auto topmost = [&](auto&& contains) {
    int best = -1;
    for (int i = 0; i < b; ++i) {
      if (contains(i) && (best < 0 || depth[i] < depth[best])) best = i;
    }
    return best;
  };
  h.vertex_home.resize(static_cast<std::size_t>(p));
  for (VertexId w = 0; w < p; ++w) {
    h.vertex_home[w] = topmost([&](int i) { return member[i][w] != 0; });
  }
  h.edge_home.resize(cg.edges().size());
  for (std::size_t k = 0; k < cg.edges().size(); ++k) {
    const auto& e = cg.edges()[k];
    h.edge_home[k] = topmost([&](int i) { return member[i][e.from] && member[i][e.to]; });
    if (h.edge_home[k] < 0) bad("edge " + detail::edge_label(e.from, e.to) + " is in no bag");
  }
  return h;
}

/// Path of bags, bag i holding layers i and i+1.
inline TreeDecomposition layered_path_decomposition(const LayeredStructure& ls,
                                                    const ComputationGraph& cg) {
  (void)cg;
  TreeDecomposition td;
  const int r = ls.layer_count();
  if (r == 1) {
    td.bags.push_back(ls.layers[0]);
    return td;
  }
  for (int i = 0; i + 1 < r; ++i) {
    std::vector<VertexId> bag = ls.layers[i];
    bag.insert(bag.end(), ls.layers[i + 1].begin(), ls.layers[i + 1].end());
    std::sort(bag.begin(), bag.end());
    td.bags.push_back(std::move(bag));
    if (i > 0) td.tree_edges.emplace_back(i - 1, i);
  }
  return td;
}

/// Min-fill elimination ordering (ties to the smallest id), followed by
/// merging every bag into a tree neighbour that contains it.
inline TreeDecomposition min_fill_decomposition(const ComputationGraph& cg) {
  const int p = cg.vertex_count();
  std::vector<std::set<VertexId>> g(static_cast<std::size_t>(p));
  for (const auto& e : cg.edges()) {
    g[e.from].insert(e.to);
    g[e.to].insert(e.from);
  }

  std::vector<char> gone(static_cast<std::size_t>(p), 0);
  std::vector<int> position(static_cast<std::size_t>(p), 0);
  std::vector<VertexId> order;
  std::vector<std::vector<VertexId>> bag_of(static_cast<std::size_t>(p));
  for (int step = 0; step < p; ++step) {
    VertexId pick = -1;
    long best_fill = std::numeric_limits<long>::max();
    for (VertexId v = 0; v < p; ++v) {
      if (gone[v]) continue;
      long fill = 0;
      for (auto a = g[v].begin(); a != g[v].end(); ++a) {
        for (auto c = std::next(a); c != g[v].end(); ++c) fill += !g[*a].count(*c);
      }
      if (fill < best_fill) {
        best_fill = fill;
        pick = v;
      }
    }
    std::vector<VertexId> nb(g[pick].begin(), g[pick].end());
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        g[nb[i]].insert(nb[j]);
        g[nb[j]].insert(nb[i]);
      }
      g[nb[i]].erase(pick);
    }
    bag_of[pick] = nb;
    bag_of[pick].push_back(pick);
    std::sort(bag_of[pick].begin(), bag_of[pick].end());
    gone[pick] = 1;
    position[pick] = step;
    order.push_back(pick);
  }

  // Bag index = elimination step. Parent: earliest-eliminated later neighbour;
  // roots of separate components hang under the last bag.
  const int b = p;
  std::vector<std::vector<VertexId>> bags(static_cast<std::size_t>(b));
  std::vector<std::set<int>> tree(static_cast<std::size_t>(b));
  for (int i = 0; i < b; ++i) {
    const VertexId v = order[i];
    bags[i] = bag_of[v];
    int parent = -1;
    for (VertexId u : bag_of[v]) {
      if (u != v && (parent < 0 || position[u] < parent)) parent = position[u];
    }
    if (parent < 0 && i != b - 1) parent = b - 1;
    if (parent >= 0) {
      tree[i].insert(parent);
      tree[parent].insert(i);
    }
  }

  std::vector<char> alive(static_cast<std::size_t>(b), 1);
  for (bool changed = true; changed;) {
    changed = false;
    for (int a = 0; a < b && !changed; ++a) {
      if (!alive[a]) continue;
      for (int c : tree[a]) {
        if (!std::includes(bags[c].begin(), bags[c].end(), bags[a].begin(), bags[a].end())) {
          continue;
        }
        for (int x : tree[a]) {
          tree[x].erase(a);
          if (x != c) {
            tree[x].insert(c);
            tree[c].insert(x);
          }
        }
        tree[a].clear();
        alive[a] = 0;
        changed = true;
        break;
      }
    }
  }

  TreeDecomposition td;
  std::vector<int> renumber(static_cast<std::size_t>(b), -1);
  for (int i = 0; i < b; ++i) {
    if (!alive[i]) continue;
    renumber[i] = static_cast<int>(td.bags.size());
    td.bags.push_back(bags[i]);
  }
  for (int i = 0; i < b; ++i) {
    for (int j : tree[i]) {
      if (i < j) td.tree_edges.emplace_back(renumber[i], renumber[j]);
    }
  }
  td.root = static_cast<int>(td.bags.size()) - 1;
  return td;
}

struct TreewidthOptions {
  std::uint64_t budget = 50'000'000;  // max assignments of one bag
};

/// Each bag's table holds, per bag assignment, the best cost of everything
/// charged in its subtree. Children pass up minima over their separator.
inline CostResult min_cost_treewidth(const ComputationGraph& cg, const TreeDecomposition& td,
                                     const NetworkGraph& net, const DistanceMatrix& dm,
                                     TreewidthOptions opts = {}) {
  check_compatible(cg, net);
  const auto homes = validate_decomposition(cg, td);
  const int b = static_cast<int>(td.bags.size());
  const int p = cg.vertex_count();

  auto pin_of = [&](VertexId w) -> NodeId {
    if (cg.is_source(w)) return net.sources()[cg.source_index(w)];
    if (w == cg.sink()) return net.sink();
    return -1;
  };
  auto domain_of = [&](const std::vector<VertexId>& vs) {
    std::vector<NodeId> pins;
    for (VertexId w : vs) pins.push_back(pin_of(w));
    return AssignmentDomain(net.node_count(), std::move(pins));
  };

  std::vector<std::vector<VertexId>> bags = td.bags;
  for (auto& bag : bags) std::sort(bag.begin(), bag.end());
  std::vector<AssignmentDomain> domains;
  for (const auto& bag : bags) {
    domains.push_back(domain_of(bag));
    domains.back().require_within(opts.budget, "bag");
  }

  struct LocalTerm {
    int a, c;
    double weight;
  };
  std::vector<std::vector<int>> homed_vertices(static_cast<std::size_t>(b));
  std::vector<std::vector<LocalTerm>> homed_edges(static_cast<std::size_t>(b));
  auto index_in = [&](int bag, VertexId w) {
    return static_cast<int>(std::lower_bound(bags[bag].begin(), bags[bag].end(), w) -
                            bags[bag].begin());
  };
  for (VertexId w = 0; w < p; ++w) {
    homed_vertices[homes.vertex_home[w]].push_back(index_in(homes.vertex_home[w], w));
  }
  for (std::size_t k = 0; k < cg.edges().size(); ++k) {
    const auto& e = cg.edges()[k];
    const int h = homes.edge_home[k];
    homed_edges[h].push_back({index_in(h, e.from), index_in(h, e.to), e.weight});
  }

  std::vector<std::vector<int>> children(static_cast<std::size_t>(b));
  for (int x : homes.order) {
    if (homes.parent[x] >= 0) children[homes.parent[x]].push_back(x);
  }

  struct Message {
    std::vector<int> parent_positions;  // separator vertices as positions in the parent bag
    std::vector<int> child_positions;
    AssignmentDomain domain;
    std::vector<double> best;
    std::vector<std::uint64_t> argbest;
  };
  std::vector<std::vector<double>> table(static_cast<std::size_t>(b));
  std::vector<Message> message(static_cast<std::size_t>(b));

  std::vector<NodeId> tuple;
  std::vector<NodeId> sep_tuple;
  for (int x : homes.order) {
    const auto& dom = domains[x];
    const std::size_t size = static_cast<std::size_t>(dom.size());
    auto& tab = table[x];
    tab.assign(size, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      dom.decode(i, tuple);
      double c = 0.0;
      for (int a : homed_vertices[x]) c += cg.processing(bags[x][a], tuple[a]);
      for (const auto& t : homed_edges[x]) c += t.weight * dm(tuple[t.a], tuple[t.c]);
      for (int child : children[x]) {
        const auto& msg = message[child];
        sep_tuple.resize(msg.parent_positions.size());
        for (std::size_t s = 0; s < sep_tuple.size(); ++s) sep_tuple[s] = tuple[msg.parent_positions[s]];
        c += msg.best[msg.domain.encode(sep_tuple)];
      }
      tab[i] = c;
    }

    const int par = homes.parent[x];
    if (par < 0) continue;
    Message& msg = message[x];
    std::vector<VertexId> sep;
    std::set_intersection(bags[x].begin(), bags[x].end(), bags[par].begin(), bags[par].end(),
                          std::back_inserter(sep));
    for (VertexId w : sep) {
      msg.parent_positions.push_back(index_in(par, w));
      msg.child_positions.push_back(index_in(x, w));
    }
    msg.domain = domain_of(sep);
    msg.best.assign(static_cast<std::size_t>(msg.domain.size()),
                    std::numeric_limits<double>::infinity());
    msg.argbest.assign(msg.best.size(), 0);
    for (std::size_t i = 0; i < size; ++i) {
      dom.decode(i, tuple);
      sep_tuple.resize(sep.size());
      for (std::size_t s = 0; s < sep.size(); ++s) sep_tuple[s] = tuple[msg.child_positions[s]];
      const std::uint64_t k = msg.domain.encode(sep_tuple);
      if (tab[i] < msg.best[k]) {
        msg.best[k] = tab[i];
        msg.argbest[k] = i;
      }
    }
    std::vector<double>().swap(table[x]);  // only the message is needed now
  }

  const auto& root_tab = table[td.root];
  std::uint64_t root_arg = 0;
  for (std::uint64_t i = 1; i < root_tab.size(); ++i) {
    if (root_tab[i] < root_tab[root_arg]) root_arg = i;
  }

  CostResult out;
  out.cost = root_tab[root_arg];
  out.embedding.image.assign(static_cast<std::size_t>(p), -1);
  std::vector<std::uint64_t> chosen(static_cast<std::size_t>(b), 0);
  chosen[td.root] = root_arg;
  for (auto it = homes.order.rbegin(); it != homes.order.rend(); ++it) {
    const int x = *it;
    domains[x].decode(chosen[x], tuple);
    for (std::size_t i = 0; i < tuple.size(); ++i) out.embedding.image[bags[x][i]] = tuple[i];
    for (int child : children[x]) {
      const auto& msg = message[child];
      sep_tuple.resize(msg.parent_positions.size());
      for (std::size_t s = 0; s < sep_tuple.size(); ++s) sep_tuple[s] = tuple[msg.parent_positions[s]];
      chosen[child] = msg.argbest[msg.domain.encode(sep_tuple)];
    }
  }
  return out;
}

}  // namespace netembed
