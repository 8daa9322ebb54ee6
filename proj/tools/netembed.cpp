// Command-line front end: solve, evaluate, perturb, benchmark and validate.
//
// Exit codes: 0 success, 1 usage, 2 invalid or unreadable input,
// 3 budget exceeded, 4 solver precondition not met.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "netembed/netembed.hpp"

namespace {

using namespace netembed;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  int threads = 1;
};

int exit_code(ErrorKind kind) {
  switch (category(kind)) {
    case ErrorCategory::Validation: return 2;
    case ErrorCategory::Budget: return 3;
    case ErrorCategory::Precondition: return 4;
  }
  return 1;
}

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_warnings(const ComputationGraph& cg) {
  for (const auto& w : cg.warnings()) std::cerr << "warning: " << w << "\n";
}

json embedding_document(const Embedding& e, const SymbolTable& vnames, const SymbolTable& nnames,
                        const std::string& objective, const std::string& method, double value) {
  json j = to_json(e, vnames, nnames);
  j["objective"] = objective;
  j["method"] = method;
  j["value"] = value;
  return j;
}

// ---- solve ----

struct SolveArgs {
  std::string objective;
  std::string method;
  std::string network;
  std::string computation;
  std::string decomposition;
  std::string out;
  std::string state_out;
  bool allow_source_processing = false;
};

int run_solve(const SolveArgs& a, const Globals& g) {
  const bool mincost = a.objective == "mincost";
  const bool fits = mincost ? (a.method == "layered" || a.method == "treewidth" || a.method == "oracle")
                            : (a.method == "tree" || a.method == "collapse" || a.method == "oracle");
  if (!fits) throw Usage("method " + a.method + " does not solve " + a.objective);
  if (!a.decomposition.empty() && a.method != "treewidth") {
    throw Usage("--decomposition only applies to --method treewidth");
  }
  if (!a.state_out.empty() && a.method != "layered") {
    throw Usage("--state-out only applies to --method layered");
  }

  auto net = load_network(read_json_file(a.network));
  ComputationGraph::Options options;
  options.allow_source_processing = a.allow_source_processing;
  // Only the cost objective ignores edge direction, so only it accepts cycles.
  options.allow_cycles = mincost && (a.method == "treewidth" || a.method == "oracle");
  auto cg = load_computation(read_json_file(a.computation), net.names, options);
  print_warnings(cg.graph);
  const auto dm = apsp(net.graph);

  Embedding e;
  double value = 0.0;
  std::optional<LayeredDPState> state;
  if (a.method == "layered") {
    LayeredOptions o;
    o.threads = g.threads;
    if (g.budget) o.budget = *g.budget;
    const auto ls = cg.layering ? *cg.layering : infer_layering(cg.graph);
    auto sol = min_cost_layered(cg.graph, ls, net.graph, dm, o);
    e = sol.embedding;
    value = sol.cost;
    state = std::move(sol.state);
  } else if (a.method == "treewidth") {
    TreewidthOptions o;
    if (g.budget) o.budget = *g.budget;
    const auto td = a.decomposition.empty()
                        ? min_fill_decomposition(cg.graph)
                        : load_decomposition(read_json_file(a.decomposition), cg.names);
    auto r = min_cost_treewidth(cg.graph, td, net.graph, dm, o);
    e = r.embedding;
    value = r.cost;
  } else if (a.method == "oracle") {
    EnumerationOptions o;
    o.threads = g.threads;
    if (g.budget) o.budget = *g.budget;
    if (mincost) {
      auto r = brute_force_min_cost(cg.graph, net.graph, dm, o);
      e = r.embedding;
      value = r.cost;
    } else {
      auto r = brute_force_min_delay(cg.graph, net.graph, dm, o);
      e = r.embedding;
      value = r.objective;
    }
  } else {
    auto r = a.method == "tree" ? min_delay_tree(cg.graph, net.graph, dm)
                                : min_delay_collapse(cg.graph, net.graph, dm);
    e = r.embedding;
    value = r.objective;
  }

  const auto doc = embedding_document(e, cg.names, net.names, a.objective, a.method, value);
  if (!a.out.empty()) write_text_file(a.out, doc.dump(2) + "\n");
  if (state) {
    if (!a.state_out.empty()) write_text_file(a.state_out, save_state(*state, &net.names, &cg.names));
  }
  std::cout << format_number(value) << "\n";
  return 0;
}

// ---- eval ----

struct EvalArgs {
  std::string metric;
  std::string network;
  std::string computation;
  std::string embedding;
  bool per_direction = false;
  bool allow_source_processing = false;
};

int run_eval(const EvalArgs& a) {
  auto net = load_network(read_json_file(a.network));
  ComputationGraph::Options options;
  options.allow_source_processing = a.allow_source_processing;
  options.allow_cycles = a.metric == "cost" || a.metric == "link-usage";
  auto cg = load_computation(read_json_file(a.computation), net.names, options);
  print_warnings(cg.graph);
  const auto e = load_embedding(read_json_file(a.embedding), cg.names, net.names);
  validate_embedding(cg.graph, net.graph, e);
  const auto dm = apsp(net.graph);
  if (a.metric == "cost") {
    std::cout << format_number(embedding_cost(cg.graph, dm, e)) << "\n";
  } else if (a.metric == "delay") {
    std::cout << format_number(embedding_delay(cg.graph, dm, e).total) << "\n";
  } else if (a.metric == "capdelay") {
    std::cout << format_number(capacity_aware_delay(cg.graph, net.graph, dm, e, {a.per_direction}).report.total)
              << "\n";
  } else {
    std::cout << max_link_usage(cg.graph, dm, e) << "\n";
  }
  return 0;
}

// ---- perturb ----

struct PerturbArgs {
  std::string state;
  std::string edits;
  std::string out;
  std::string state_out;
};

int run_perturb(const PerturbArgs& a, const Globals& g) {
  auto doc = load_state(detail::read_file(a.state));
  const auto& st = doc.state;
  auto edits = load_edits(read_json_file(a.edits), doc.computation_names, doc.network_names);
  auto cg2 = extend_computation(st.computation, edits.edits, edits.new_rows);
  const auto dm = apsp(st.network);
  LayeredOptions o;
  o.threads = g.threads;
  if (g.budget) o.budget = *g.budget;
  auto sol = apply_perturbations(st, cg2, edits.edits, dm, o);
  const auto out = embedding_document(sol.embedding, edits.names, doc.network_names, "mincost",
                                      "layered", sol.cost);
  if (!a.out.empty()) write_text_file(a.out, out.dump(2) + "\n");
  if (!a.state_out.empty()) {
    write_text_file(a.state_out, save_state(sol.state, &doc.network_names, &edits.names));
  }
  std::cout << format_number(sol.cost) << "\n";
  return 0;
}

// ---- bench ----

struct BenchArgs {
  std::string experiment;
  std::string config;
  std::string csv;
};

int run_bench(const BenchArgs& a, const Globals& g) {
  const json cfg = a.config.empty() ? json::object() : read_json_file(a.config);
  std::string csv;
  if (a.experiment == "link-usage") {
    auto c = load_link_usage_config(cfg);
    if (g.seed) c.seed = *g.seed;
    const auto r = experiment_link_usage(c);
    for (const auto& row : r.table.rows) {
      std::cerr << "p_r=" << format_number(row.p_r) << " resamples=" << row.resamples
                << " discarded=" << row.discarded << "\n";
    }
    csv = r.table.to_csv();
  } else {
    auto c = load_k2_config(cfg);
    if (g.seed) c.seed = *g.seed;
    if (g.budget) c.budget = *g.budget;
    const auto r = experiment_k2_gap(c);
    std::cerr << "within k^2: " << r.within << "/" << r.records.size()
              << " max ratio " << format_number(r.max_ratio) << " mean ratio "
              << format_number(r.mean_ratio) << "\n";
    csv = r.to_csv();
  }
  if (a.csv.empty()) {
    std::cout << csv;
  } else {
    write_text_file(a.csv, csv);
  }
  return 0;
}

// ---- validate ----

struct ValidateArgs {
  std::string network;
  std::string computation;
  bool allow_cycles = false;
};

int run_validate(const ValidateArgs& a) {
  auto net = load_network(read_json_file(a.network));
  std::cout << "network ok: " << net.graph.node_count() << " nodes, " << net.graph.edges().size()
            << " links\n";
  if (!a.computation.empty()) {
    ComputationGraph::Options o;
    o.allow_cycles = a.allow_cycles;
    auto cg = load_computation(read_json_file(a.computation), net.names, o);
    print_warnings(cg.graph);
    check_compatible(cg.graph, net.graph);
    std::cout << "computation ok: " << cg.graph.vertex_count() << " vertices, "
              << cg.graph.edges().size() << " edges\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embed computation graphs into communication networks"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0, budget = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the master seed of an experiment");
  auto* budget_opt =
      app.add_option("--budget", budget, "Search budget (embeddings, tuple pairs or bag assignments)");
  app.add_option("--threads", g.threads, "Worker threads for the solvers")->check(CLI::PositiveNumber);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Compute an optimal embedding");
  solve->add_option("--objective", sa.objective)->required()->check(CLI::IsMember({"mincost", "mindelay"}));
  solve->add_option("--method", sa.method)
      ->required()
      ->check(CLI::IsMember({"tree", "layered", "treewidth", "collapse", "oracle"}));
  solve->add_option("--network", sa.network)->required();
  solve->add_option("--computation", sa.computation)->required();
  solve->add_option("--decomposition", sa.decomposition);
  solve->add_option("--out", sa.out);
  solve->add_option("--state-out", sa.state_out);
  solve->add_flag("--allow-source-processing", sa.allow_source_processing);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate an embedding");
  eval->add_option("--metric", ea.metric)
      ->required()
      ->check(CLI::IsMember({"cost", "delay", "capdelay", "link-usage"}));
  eval->add_option("--network", ea.network)->required();
  eval->add_option("--computation", ea.computation)->required();
  eval->add_option("--embedding", ea.embedding)->required();
  eval->add_flag("--per-direction", ea.per_direction, "Model each link as two one-way channels");
  eval->add_flag("--allow-source-processing", ea.allow_source_processing);

  PerturbArgs pa;
  auto* perturb = app.add_subcommand("perturb", "Apply edge additions to a saved layered solution");
  perturb->add_option("--state", pa.state)->required();
  perturb->add_option("--edits", pa.edits)->required();
  perturb->add_option("--out", pa.out);
  perturb->add_option("--state-out", pa.state_out);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run an experiment and write CSV");
  bench->add_option("experiment", ba.experiment)->required()->check(CLI::IsMember({"link-usage", "k2-gap"}));
  bench->add_option("--config", ba.config);
  bench->add_option("--csv", ba.csv);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check input files");
  validate->add_option("--network", va.network)->required();
  validate->add_option("--computation", va.computation, "Also check a computation graph against the network");
  validate->add_flag("--allow-cycles", va.allow_cycles);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*seed_opt) g.seed = seed;
  if (*budget_opt) g.budget = budget;

  try {
    if (*solve) return run_solve(sa, g);
    if (*eval) return run_eval(ea);
    if (*perturb) return run_perturb(pa, g);
    if (*bench) return run_bench(ba, g);
    return run_validate(va);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Usage& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
