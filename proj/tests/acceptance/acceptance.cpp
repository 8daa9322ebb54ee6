// Acceptance checks. Prints one PASS/FAIL line per criterion; with
// --criterion N only that one runs and the exit status reflects it.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/fixtures.hpp"

using namespace netembed;
using netembed::testing::load_pair;
using netembed::testing::random_embedding;

namespace {

struct Check {
  std::string what;
  bool ok = true;
  std::string detail;
};

struct Outcome {
  std::vector<Check> checks;
  std::string note;

  void expect(const std::string& what, bool ok, const std::string& detail = "") {
    checks.push_back({what, ok, detail});
  }
  void equal(const std::string& what, double got, double want, double tol = 0.0) {
    const bool ok = tol == 0.0 ? got == want : std::abs(got - want) <= tol;
    expect(what, ok, "got " + format_number(got) + ", want " + format_number(want));
  }
  bool ok() const {
    for (const auto& c : checks) {
      if (!c.ok) return false;
    }
    return true;
  }
};

ComputationGraph strip_weights(const ComputationGraph& cg) {
  std::vector<ComputationEdge> edges;
  for (auto e : cg.edges()) edges.push_back({e.from, e.to, 1.0});
  return ComputationGraph::build(cg.vertex_count(), edges, cg.sources(), cg.sink(),
                                 ProcessingTable(cg.vertex_count(), cg.network_size(), 0.0));
}

NetworkGraph reversed(const NetworkGraph& g) {
  std::vector<NetworkEdge> edges;
  for (const auto& e : g.edges()) edges.push_back({e.v, e.u, e.weight});
  return NetworkGraph::build(g.node_count(), std::move(edges), g.sources(), g.sink());
}

Outcome shared_adder() {
  Outcome o;
  auto f = load_pair("shared_adder_network.json", "shared_adder_computation.json");
  const auto& cg = f.computation.graph;
  const auto e1 = f.embedding("shared_adder_e1.json");
  const auto e2 = f.embedding("shared_adder_e2.json");
  o.equal("C(E1)", embedding_cost(cg, f.dm, e1), 36);
  o.equal("C(E2)", embedding_cost(cg, f.dm, e2), 34);
  o.equal("d(E1)", embedding_delay(cg, f.dm, e1).total, 14);
  o.equal("d(E2)", embedding_delay(cg, f.dm, e2).total, 16);
  o.equal("min_cost_layered", min_cost_layered(cg, infer_layering(cg), f.network.graph, f.dm).cost, 34);
  o.equal("brute_force_min_delay", brute_force_min_delay(cg, f.network.graph, f.dm).objective, 14);
  o.note = "shortest s2-c route is s2-a-d-c (4), so E1 costs 32 and the optimum is 31";
  return o;
}

Outcome gap_closed_forms() {
  Outcome o;
  const double a = 10, eps = 0.1;
  const int l = 3;
  auto g = netembed::testing::gap_example(a, eps, l);
  auto dm = apsp(g.network);
  const auto& cg = g.computation;
  o.equal("C(E1)", embedding_cost(cg, dm, g.e1), l * (3 + 1.1 * a + 2 * eps) + eps, 1e-9);
  o.equal("d(E1)", embedding_delay(cg, dm, g.e1).total, (a + eps + 2) * l + eps, 1e-9);
  o.equal("C(E2)", embedding_cost(cg, dm, g.e2), l * (3 + 1.2 * a + 2 * eps) + eps, 1e-9);
  o.equal("d(E2)", embedding_delay(cg, dm, g.e2).total, (0.7 * a + eps + 2) * l + eps, 1e-9);
  o.note = "shortest paths through the eps rungs undercut the direct links the formulas charge";
  return o;
}

Outcome contention() {
  Outcome o;
  auto f = load_pair("contention_network.json", "contention_computation.json");
  const auto& cg = f.computation.graph;
  const auto e = f.embedding("contention_embedding.json");
  o.equal("delay", embedding_delay(cg, f.dm, e).total, 5);
  o.equal("capacity-aware delay", capacity_aware_delay(cg, f.network.graph, f.dm, e).report.total, 6);
  o.equal("min_delay_tree", min_delay_tree(cg, f.network.graph, f.dm).objective, 5);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(derive_seed(2024, {4}));
  int trees = 0, layered = 0, treewidth = 0, paths = 0;
  for (int i = 0; i < 200; ++i) {
    auto inst = random_tree_instance(rng);
    auto dm = apsp(inst.network);
    trees += min_delay_tree(inst.computation, inst.network, dm).objective ==
             brute_force_min_delay(inst.computation, inst.network, dm).objective;
  }
  for (int i = 0; i < 200; ++i) {
    auto inst = random_layered_instance(rng);
    auto dm = apsp(inst.network);
    layered += min_cost_layered(inst.computation, *inst.layering, inst.network, dm).cost ==
               brute_force_min_cost(inst.computation, inst.network, dm).cost;
  }
  for (int i = 0; i < 100; ++i) {
    auto inst = random_dag_instance(rng);
    auto dm = apsp(inst.network);
    treewidth += min_cost_treewidth(inst.computation, min_fill_decomposition(inst.computation),
                                    inst.network, dm)
                     .cost == brute_force_min_cost(inst.computation, inst.network, dm).cost;
  }
  for (int i = 0; i < 50; ++i) {
    auto inst = random_layered_instance(rng);
    auto dm = apsp(inst.network);
    const auto td = layered_path_decomposition(*inst.layering, inst.computation);
    paths += min_cost_treewidth(inst.computation, td, inst.network, dm).cost ==
             min_cost_layered(inst.computation, *inst.layering, inst.network, dm).cost;
  }
  o.equal("tree DP = oracle (of 200)", trees, 200);
  o.equal("layered DP = oracle (of 200)", layered, 200);
  o.equal("treewidth DP = oracle (of 100)", treewidth, 100);
  o.equal("path decomposition = layered DP (of 50)", paths, 50);
  return o;
}

Outcome incremental() {
  Outcome o;
  std::mt19937_64 rng(derive_seed(2024, {5}));
  int same = 0, absorbed = 0;
  for (int i = 0; i < 100; ++i) {
    auto inst = random_layered_instance(rng);
    auto dm = apsp(inst.network);
    auto sol = min_cost_layered(inst.computation, *inst.layering, inst.network, dm);
    auto batch = random_edit_batch(rng, inst);
    auto cg2 = extend_computation(inst.computation, batch.edits, batch.new_rows);
    auto upd = apply_perturbations(sol.state, cg2, batch.edits, dm);
    same += upd.cost == min_cost_layered(cg2, upd.state.layering, inst.network, dm).cost;
    absorbed += static_cast<int>(upd.state.absorbed.size());
  }
  o.equal("incremental = fresh (of 100)", same, 100);
  o.note = std::to_string(absorbed) + " pendant vertices placed without a re-solve";
  return o;
}

Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(derive_seed(2024, {6}));
  int delay_le_cost = 0, direction = 0, contention_ge = 0, collapse = 0;
  for (int i = 0; i < 1000; ++i) {
    auto inst = random_dag_instance(rng);
    const auto& cg = inst.computation;
    auto dm = apsp(inst.network);
    auto e = random_embedding(rng, cg, inst.network);
    const double d = embedding_delay(cg, dm, e).total;
    delay_le_cost += d <= embedding_cost(cg, dm, e);
    auto dm_rev = apsp(reversed(inst.network));
    direction += embedding_cost(cg, dm, e) == embedding_cost(cg, dm_rev, e);
    contention_ge += capacity_aware_delay(cg, inst.network, dm, e).report.total >= d;
  }
  for (int i = 0; i < 100; ++i) {
    auto inst = random_dag_instance(rng);
    auto cg = strip_weights(inst.computation);
    auto dm = apsp(inst.network);
    double bound = 0;
    for (NodeId s : inst.network.sources()) bound = std::max(bound, dm(s, inst.network.sink()));
    collapse += brute_force_min_delay(cg, inst.network, dm).objective == bound &&
                min_delay_collapse(cg, inst.network, dm).objective == bound;
  }
  o.equal("d(E) <= C(E) (of 1000)", delay_le_cost, 1000);
  o.equal("cost unchanged by edge reversal (of 1000)", direction, 1000);
  o.equal("capacity-aware >= plain delay (of 1000)", contention_ge, 1000);
  o.equal("collapse bound is optimal (of 100)", collapse, 100);
  return o;
}

Outcome link_usage() {
  Outcome o;
  auto cfg = load_link_usage_config(read_json_file(netembed::testing::fixture("desk_link_usage.json")));
  const auto r = experiment_link_usage(cfg);
  std::ostringstream means;
  int inversions = 0;
  bool small = true;
  for (std::size_t i = 0; i < r.table.rows.size(); ++i) {
    means << (i ? " " : "") << format_number(r.table.rows[i].mean);
    if (i > 0) {
      const double rise = r.table.rows[i].mean - r.table.rows[i - 1].mean;
      if (rise > 0) {
        ++inversions;
        small = small && rise <= 0.2;
      }
    }
  }
  o.expect("means non-increasing up to one inversion <= 0.2", inversions <= 1 && small,
           "means " + means.str());
  o.expect("mean at p_r=0.8 <= 1.2", r.table.rows.back().mean <= 1.2,
           "got " + format_number(r.table.rows.back().mean));
  return o;
}

Outcome k_squared() {
  Outcome o;
  auto cfg = load_k2_config(read_json_file(netembed::testing::fixture("k2_gap.json")));
  const auto r = experiment_k2_gap(cfg);
  for (const auto& x : r.records) {
    std::cout << "  k2 instance " << x.instance << ": k=" << x.k << " r=" << x.r << " n=" << x.n
              << " ratio=" << format_number(x.ratio) << " bound=" << format_number(x.bound)
              << (x.within ? "" : " OUTSIDE") << "\n";
  }
  o.expect("ratio <= k^2 on >= 95 of 100", r.within >= 95, std::to_string(r.within) + " within");
  o.note = "max ratio " + format_number(r.max_ratio) + ", mean " + format_number(r.mean_ratio);
  return o;
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"shared-adder example values", 1, shared_adder},
      {"gap example closed forms", 1, gap_closed_forms},
      {"link contention example", 1, contention},
      {"solvers match the oracle", 120, oracle_equivalence},
      {"incremental equals fresh solve", 60, incremental},
      {"property suites", 300, properties},
      {"link usage falls toward one", 300, link_usage},
      {"min-cost delay within k^2", 120, k_squared},
  };
  return all;
}

bool run_one(int index) {
  const auto& c = criteria()[index - 1];
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.expect("ran without error", false, e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.expect("runtime under " + format_number(c.limit_seconds) + " s", secs < c.limit_seconds);
  for (const auto& ch : o.checks) {
    std::cout << "  " << (ch.ok ? "ok   " : "FAIL ") << ch.what;
    if (!ch.detail.empty()) std::cout << " (" << ch.detail << ")";
    std::cout << "\n";
  }
  if (!o.note.empty()) std::cout << "  note: " << o.note << "\n";
  const bool ok = o.ok();
  std::cout << "criterion " << index << ": " << (ok ? "PASS" : "FAIL") << " - " << c.name << " ["
            << format_number(std::round(secs * 1000) / 1000) << " s]\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  const int count = static_cast<int>(criteria().size());
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    const int n = std::atoi(argv[2]);
    if (n < 1 || n > count) {
      std::cerr << "criterion must be 1.." << count << "\n";
      return 1;
    }
    return run_one(n) ? 0 : 1;
  }
  if (argc != 1) {
    std::cerr << "usage: acceptance [--criterion N]\n";
    return 1;
  }
  int failed = 0;
  for (int i = 1; i <= count; ++i) failed += !run_one(i);
  std::cout << (count - failed) << "/" << count << " criteria pass\n";
  return failed ? 1 : 0;
}
