// Loads the shared-adder network and computation, finds a min-cost and a
// min-delay embedding, and prints where each vertex lands.

#include <iostream>
#include <string>

#include "netembed/netembed.hpp"

using namespace netembed;

namespace {

void print(const char* title, const ComputationDoc& cg, const NetworkDoc& net, const Embedding& e,
           double value) {
  std::cout << title << " = " << format_number(value) << "\n";
  for (VertexId w = 0; w < cg.graph.vertex_count(); ++w) {
    std::cout << "  " << cg.names.name(w) << " -> " << net.names.name(e[w]) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : NETEMBED_FIXTURE_DIR;
  try {
    auto net = load_network(read_json_file(dir + "/shared_adder_network.json"));
    auto cg = load_computation(read_json_file(dir + "/shared_adder_computation.json"), net.names);
    auto dm = apsp(net.graph);

    auto cost = min_cost_layered(cg.graph, infer_layering(cg.graph), net.graph, dm);
    print("min cost", cg, net, cost.embedding, cost.cost);

    auto delay = brute_force_min_delay(cg.graph, net.graph, dm);
    print("min delay", cg, net, delay.embedding, delay.objective);
    std::cout << "delay of the min-cost embedding = "
              << format_number(embedding_delay(cg.graph, dm, cost.embedding).total) << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
