#pragma once

// JSON documents for graphs, embeddings, edits, decompositions and experiment
// configs, plus the binary format for persisted layered DP state.
//
// State blob layout (little endian; u32/u64 unsigned, f64 IEEE-754 binary64):
//   "NETEMBDP" u32 version
//   network:      u32 n, u32 m, m x (u32 u, u32 v, f64 w), u32 K, K x u32, u32 sink
//   computation:  u32 p, u32 q, q x (u32 from, u32 to, f64 lambda), u32 K, K x u32,
//                 u32 sink, u8 source_processing, p*n x f64 (row-major by vertex)
//   layering:     p x u32 layer (1-based), u32 max_width
//   dp layers:    u32 r, r x (u32 count, count x u32 vertex)
//   absorbed:     u32 count, count x (u32 vertex, u32 anchor, f64 constant)
//   tables:       u32 steps, steps x (u64 size, size x f64 best, size x u64 argbest)
//   f64 dp_cost, f64 cost, u32 p, p x u32 image
//   names:        u8 present, then network and computation names as
//                 (u32 count, count x (u32 length, bytes))
// Table entry y of step j is the assignment of DP layer j+1 with mixed-radix
// index y: free positions in layer order, the first one most significant,
// each digit a node id in [0, n). Pinned positions take no digit.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "netembed/harness.hpp"
#include "netembed/metrics.hpp"
#include "netembed/solver_layered.hpp"
#include "netembed/solver_treewidth.hpp"

namespace netembed {

using json = nlohmann::json;

/// Dense ids for external names.
class SymbolTable {
 public:
  int add(const std::string& name) {
    auto [it, inserted] = index_.emplace(name, static_cast<int>(names_.size()));
    if (!inserted) fail(ErrorKind::SchemaError, "name '" + name + "' listed twice");
    names_.push_back(name);
    return it->second;
  }
  int find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }
  const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  int size() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  static SymbolTable numbered(int count) {
    SymbolTable t;
    for (int i = 0; i < count; ++i) t.add(std::to_string(i));
    return t;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

namespace detail {

[[noreturn]] inline void schema(const std::string& msg) { fail(ErrorKind::SchemaError, msg); }

inline void expect_fields(const json& j, const std::string& what,
                          std::initializer_list<const char*> required,
                          std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) schema(what + " must be a JSON object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!j.contains(k)) schema(what + " is missing field '" + k + "'");
  }
  for (const char* k : optional) allowed.insert(k);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) schema(what + " has unknown field '" + it.key() + "'");
  }
}

inline std::string name_of(const json& j, const std::string& what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  schema(what + " must be a string or an integer");
}

inline double number_of(const json& j, const std::string& what) {
  if (j.is_number_integer()) return static_cast<double>(j.get<long long>());
  if (j.is_number_unsigned()) return static_cast<double>(j.get<unsigned long long>());
  if (j.is_number_float()) return j.get<double>();
  schema(what + " must be a number");
}

inline long long integer_of(const json& j, const std::string& what) {
  if (!j.is_number_integer()) schema(what + " must be an integer");
  return j.get<long long>();
}

inline const json& array_of(const json& j, const std::string& what) {
  if (!j.is_array()) schema(what + " must be an array");
  return j;
}

inline int lookup(const SymbolTable& t, const json& j, const std::string& what) {
  const std::string name = name_of(j, what);
  const int id = t.find(name);
  if (id < 0) fail(ErrorKind::UnknownNodeId, what + " '" + name + "' is not declared");
  return id;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::SchemaError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline json parse_json(const std::string& text, const std::string& what = "document") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::SchemaError, what + " is not valid JSON: " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  return parse_json(detail::read_file(path), path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::SchemaError, "cannot write " + path);
  out << text;
}

// ---- network ----

struct NetworkDoc {
  NetworkGraph graph;
  SymbolTable names;
};

inline NetworkDoc load_network(const json& j) {
  detail::expect_fields(j, "network", {"nodes", "edges", "sources", "sink"});
  NetworkDoc doc;
  for (const auto& x : detail::array_of(j["nodes"], "network.nodes")) {
    doc.names.add(detail::name_of(x, "node name"));
  }
  std::vector<NetworkEdge> edges;
  for (const auto& e : detail::array_of(j["edges"], "network.edges")) {
    if (!e.is_array() || e.size() != 3) detail::schema("network edge must be [u, v, weight]");
    edges.push_back({detail::lookup(doc.names, e[0], "node"), detail::lookup(doc.names, e[1], "node"),
                     detail::number_of(e[2], "edge weight")});
  }
  std::vector<NodeId> sources;
  for (const auto& s : detail::array_of(j["sources"], "network.sources")) {
    sources.push_back(detail::lookup(doc.names, s, "source"));
  }
  const NodeId sink = detail::lookup(doc.names, j["sink"], "sink");
  try {
    doc.graph = NetworkGraph::build(doc.names.size(), std::move(edges), std::move(sources), sink);
  } catch (const DisconnectedGraphError& e) {
    std::string msg = "network has " + std::to_string(e.components().size()) + " components:";
    for (const auto& c : e.components()) {
      msg += " {";
      for (std::size_t i = 0; i < c.size(); ++i) msg += (i ? "," : "") + doc.names.name(c[i]);
      msg += "}";
    }
    throw DisconnectedGraphError(msg, e.components());
  }
  return doc;
}

inline json to_json(const NetworkGraph& g, const SymbolTable& names) {
  json j;
  j["nodes"] = names.names();
  j["edges"] = json::array();
  for (const auto& e : g.edges()) j["edges"].push_back({names.name(e.u), names.name(e.v), e.weight});
  j["sources"] = json::array();
  for (NodeId s : g.sources()) j["sources"].push_back(names.name(s));
  j["sink"] = names.name(g.sink());
  return j;
}

// ---- computation ----

struct ComputationDoc {
  ComputationGraph graph;
  SymbolTable names;
  std::optional<LayeredStructure> layering;  // from an explicit "layers" field
};

inline ComputationDoc load_computation(const json& j, const SymbolTable& network_names,
                                       ComputationGraph::Options options = {}) {
  detail::expect_fields(j, "computation", {"nodes", "edges", "sources", "sink"},
                        {"processing", "layers"});
  ComputationDoc doc;
  for (const auto& x : detail::array_of(j["nodes"], "computation.nodes")) {
    doc.names.add(detail::name_of(x, "vertex name"));
  }
  const int p = doc.names.size();
  const int n = network_names.size();
  std::vector<ComputationEdge> edges;
  for (const auto& e : detail::array_of(j["edges"], "computation.edges")) {
    if (!e.is_array() || e.size() != 3) detail::schema("computation edge must be [u, v, lambda]");
    edges.push_back({detail::lookup(doc.names, e[0], "vertex"),
                     detail::lookup(doc.names, e[1], "vertex"),
                     detail::number_of(e[2], "edge weight")});
  }
  std::vector<VertexId> sources;
  std::vector<char> is_source(static_cast<std::size_t>(p), 0);
  for (const auto& s : detail::array_of(j["sources"], "computation.sources")) {
    sources.push_back(detail::lookup(doc.names, s, "source vertex"));
    is_source[sources.back()] = 1;
  }
  const VertexId sink = detail::lookup(doc.names, j["sink"], "sink vertex");

  ProcessingTable xi(p, n, 0.0);
  if (j.contains("processing")) {
    const json& pj = j["processing"];
    if (pj.is_object() && pj.contains("matrix")) {
      detail::expect_fields(pj, "processing", {"matrix"});
      const json& m = detail::array_of(pj["matrix"], "processing.matrix");
      if (static_cast<int>(m.size()) != p) detail::schema("processing matrix needs one row per vertex");
      for (int w = 0; w < p; ++w) {
        if (!m[w].is_array() || static_cast<int>(m[w].size()) != n) {
          detail::schema("processing matrix row needs one entry per network node");
        }
        for (int v = 0; v < n; ++v) xi(w, v) = detail::number_of(m[w][v], "processing cost");
      }
    } else {
      detail::expect_fields(pj, "processing", {}, {"default", "overrides"});
      if (pj.contains("default")) {
        const double d = detail::number_of(pj["default"], "processing default");
        for (int w = 0; w < p; ++w) {
          if (!is_source[w]) xi.set_row(w, d);
        }
      }
      if (pj.contains("overrides")) {
        for (const auto& o : detail::array_of(pj["overrides"], "processing.overrides")) {
          if (!o.is_array() || o.size() != 3) detail::schema("override must be [vertex, node, value]");
          xi(detail::lookup(doc.names, o[0], "vertex"), detail::lookup(network_names, o[1], "node")) =
              detail::number_of(o[2], "processing cost");
        }
      }
    }
  }
  doc.graph = ComputationGraph::build(p, std::move(edges), std::move(sources), sink, std::move(xi),
                                      options);
  if (j.contains("layers")) {
    std::vector<int> layer_of(static_cast<std::size_t>(p), 0);
    int l = 0;
    for (const auto& layer : detail::array_of(j["layers"], "computation.layers")) {
      ++l;
      for (const auto& w : detail::array_of(layer, "layer")) {
        const int id = detail::lookup(doc.names, w, "vertex");
        if (layer_of[id]) detail::schema("vertex listed in two layers");
        layer_of[id] = l;
      }
    }
    doc.layering = LayeredStructure::from_assignment(doc.graph, std::move(layer_of));
  }
  return doc;
}

inline json to_json(const ComputationGraph& g, const SymbolTable& names,
                    const SymbolTable& network_names) {
  (void)network_names;
  json j;
  j["nodes"] = names.names();
  j["edges"] = json::array();
  for (const auto& e : g.edges()) {
    j["edges"].push_back({names.name(e.from), names.name(e.to), e.weight});
  }
  j["sources"] = json::array();
  for (VertexId s : g.sources()) j["sources"].push_back(names.name(s));
  j["sink"] = names.name(g.sink());
  json m = json::array();
  for (int w = 0; w < g.vertex_count(); ++w) {
    auto row = g.processing().row(w);
    m.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["processing"] = {{"matrix", m}};
  return j;
}

// ---- embedding ----

inline Embedding load_embedding(const json& j, const SymbolTable& vertex_names,
                                const SymbolTable& network_names) {
  detail::expect_fields(j, "embedding", {"map"}, {"objective", "method", "value"});
  const json& m = j["map"];
  if (!m.is_object()) detail::schema("embedding.map must be an object");
  Embedding e;
  e.image.assign(static_cast<std::size_t>(vertex_names.size()), -1);
  for (auto it = m.begin(); it != m.end(); ++it) {
    const int w = vertex_names.find(it.key());
    if (w < 0) fail(ErrorKind::UnknownNodeId, "vertex '" + it.key() + "' is not declared");
    e.image[w] = detail::lookup(network_names, it.value(), "node");
  }
  for (int w = 0; w < vertex_names.size(); ++w) {
    if (e.image[w] < 0) {
      fail(ErrorKind::InvalidEmbedding, "vertex '" + vertex_names.name(w) + "' is not mapped");
    }
  }
  return e;
}

inline json to_json(const Embedding& e, const SymbolTable& vertex_names,
                    const SymbolTable& network_names) {
  json m = json::object();
  for (int w = 0; w < e.size(); ++w) m[vertex_names.name(w)] = network_names.name(e[w]);
  return {{"map", m}};
}

// ---- edits ----

struct EditsDoc {
  std::vector<Edit> edits;
  std::vector<std::vector<double>> new_rows;
  SymbolTable names;  // computation names extended with the new vertices
};

/// Unknown vertex names become new vertices, numbered in order of first
/// appearance, with zero processing unless "processing" gives a value, a
/// per-node array, or an object keyed by node name.
inline EditsDoc load_edits(const json& j, const SymbolTable& vertex_names,
                           const SymbolTable& network_names) {
  detail::expect_fields(j, "edits", {"adds"}, {"processing"});
  EditsDoc doc;
  doc.names = vertex_names;
  const int p0 = vertex_names.size();
  const int n = network_names.size();
  auto resolve = [&](const json& x) {
    const std::string name = detail::name_of(x, "vertex");
    const int id = doc.names.find(name);
    if (id >= 0) return id;
    doc.new_rows.emplace_back(static_cast<std::size_t>(n), 0.0);
    return doc.names.add(name);
  };
  for (const auto& a : detail::array_of(j["adds"], "edits.adds")) {
    detail::expect_fields(a, "edit", {"edge", "layer"});
    const json& e = a["edge"];
    if (!e.is_array() || e.size() != 3) detail::schema("edit edge must be [u, v, lambda]");
    Edit ed;
    ed.edge.from = resolve(e[0]);
    ed.edge.to = resolve(e[1]);
    ed.edge.weight = detail::number_of(e[2], "edge weight");
    ed.layer = static_cast<int>(detail::integer_of(a["layer"], "edit layer"));
    doc.edits.push_back(ed);
  }
  if (j.contains("processing")) {
    const json& pj = j["processing"];
    if (!pj.is_object()) detail::schema("edits.processing must be an object");
    for (auto it = pj.begin(); it != pj.end(); ++it) {
      const int w = doc.names.find(it.key());
      if (w < p0) detail::schema("edits.processing may only name new vertices");
      auto& row = doc.new_rows[static_cast<std::size_t>(w - p0)];
      const json& v = it.value();
      if (v.is_array()) {
        if (static_cast<int>(v.size()) != n) detail::schema("processing row has the wrong length");
        for (int i = 0; i < n; ++i) row[i] = detail::number_of(v[i], "processing cost");
      } else if (v.is_object()) {
        for (auto jt = v.begin(); jt != v.end(); ++jt) {
          const int node = network_names.find(jt.key());
          if (node < 0) fail(ErrorKind::UnknownNodeId, "node '" + jt.key() + "' is not declared");
          row[node] = detail::number_of(jt.value(), "processing cost");
        }
      } else {
        std::fill(row.begin(), row.end(), detail::number_of(v, "processing cost"));
      }
    }
  }
  return doc;
}

// ---- decomposition ----

inline TreeDecomposition load_decomposition(const json& j, const SymbolTable& vertex_names) {
  detail::expect_fields(j, "decomposition", {"bags", "tree_edges"}, {"root"});
  TreeDecomposition td;
  for (const auto& bag : detail::array_of(j["bags"], "decomposition.bags")) {
    std::vector<VertexId> b;
    for (const auto& w : detail::array_of(bag, "bag")) b.push_back(detail::lookup(vertex_names, w, "vertex"));
    td.bags.push_back(std::move(b));
  }
  for (const auto& e : detail::array_of(j["tree_edges"], "decomposition.tree_edges")) {
    if (!e.is_array() || e.size() != 2) detail::schema("tree edge must be [i, j]");
    td.tree_edges.emplace_back(static_cast<int>(detail::integer_of(e[0], "bag index")),
                               static_cast<int>(detail::integer_of(e[1], "bag index")));
  }
  if (j.contains("root")) td.root = static_cast<int>(detail::integer_of(j["root"], "root"));
  return td;
}

inline json to_json(const TreeDecomposition& td, const SymbolTable& vertex_names) {
  json bags = json::array();
  for (const auto& b : td.bags) {
    json bag = json::array();
    for (VertexId w : b) bag.push_back(vertex_names.name(w));
    bags.push_back(bag);
  }
  json edges = json::array();
  for (const auto& [a, b] : td.tree_edges) edges.push_back({a, b});
  return {{"bags", bags}, {"tree_edges", edges}, {"root", td.root}};
}

// ---- experiment configs ----

inline LinkUsageConfig load_link_usage_config(const json& j) {
  detail::expect_fields(j, "link-usage config", {},
                        {"n", "edge_probabilities", "instances", "placements", "tree_size",
                         "processing_min", "processing_max", "seed", "max_resamples"});
  LinkUsageConfig c;
  if (j.contains("n")) c.n = static_cast<int>(detail::integer_of(j["n"], "n"));
  if (j.contains("edge_probabilities")) {
    c.edge_probabilities.clear();
    for (const auto& p : detail::array_of(j["edge_probabilities"], "edge_probabilities")) {
      c.edge_probabilities.push_back(detail::number_of(p, "edge probability"));
    }
  }
  if (j.contains("instances")) c.instances = static_cast<int>(detail::integer_of(j["instances"], "instances"));
  if (j.contains("placements")) c.placements = static_cast<int>(detail::integer_of(j["placements"], "placements"));
  if (j.contains("tree_size")) c.tree_size = static_cast<int>(detail::integer_of(j["tree_size"], "tree_size"));
  if (j.contains("processing_min")) c.processing_min = detail::number_of(j["processing_min"], "processing_min");
  if (j.contains("processing_max")) c.processing_max = detail::number_of(j["processing_max"], "processing_max");
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(detail::integer_of(j["seed"], "seed"));
  if (j.contains("max_resamples")) {
    c.max_resamples = static_cast<int>(detail::integer_of(j["max_resamples"], "max_resamples"));
  }
  validate_config(c);
  return c;
}

inline K2Config load_k2_config(const json& j) {
  detail::expect_fields(j, "k2-gap config", {},
                        {"instances", "min_nodes", "max_nodes", "max_layers", "max_width",
                         "extra_edge_probability", "processing_min", "processing_max", "seed",
                         "budget"});
  K2Config c;
  auto get_int = [&](const char* k, int& dst) {
    if (j.contains(k)) dst = static_cast<int>(detail::integer_of(j[k], k));
  };
  get_int("instances", c.instances);
  get_int("min_nodes", c.min_nodes);
  get_int("max_nodes", c.max_nodes);
  get_int("max_layers", c.max_layers);
  get_int("max_width", c.max_width);
  if (j.contains("extra_edge_probability")) {
    c.extra_edge_probability = detail::number_of(j["extra_edge_probability"], "extra_edge_probability");
  }
  if (j.contains("processing_min")) c.processing_min = detail::number_of(j["processing_min"], "processing_min");
  if (j.contains("processing_max")) c.processing_max = detail::number_of(j["processing_max"], "processing_max");
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(detail::integer_of(j["seed"], "seed"));
  if (j.contains("budget")) c.budget = static_cast<std::uint64_t>(detail::integer_of(j["budget"], "budget"));
  return c;
}

// ---- DP state blob ----

namespace detail {

class BlobWriter {
 public:
  void u8(std::uint8_t x) { out_.push_back(static_cast<char>(x)); }
  void u32(std::uint32_t x) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
  }
  void f64(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    u64(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void raw(const char* s, std::size_t n) { out_.append(s, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class BlobReader {
 public:
  explicit BlobReader(const std::string& data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    const char* p = take(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return x;
  }
  std::uint64_t u64() {
    const char* p = take(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return x;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double x;
    std::memcpy(&x, &bits, sizeof x);
    return x;
  }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(take(n), n);
  }
  /// Count prefix bounded by the bytes left, so corrupt input cannot force huge allocations.
  std::size_t count(std::size_t element_size) { return bounded(u32(), element_size); }
  std::size_t count64(std::size_t element_size) { return bounded(u64(), element_size); }
  bool at_end() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::size_t bounded(std::uint64_t n, std::size_t element_size) {
    if (element_size && n > remaining() / element_size) fail(ErrorKind::StateFormat, "truncated state");
    return static_cast<std::size_t>(n);
  }
  const char* take(std::size_t n) {
    if (n > data_.size() - pos_) fail(ErrorKind::StateFormat, "truncated state");
    const char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

  const std::string& data_;
  std::size_t pos_ = 0;
};

constexpr char kStateMagic[8] = {'N', 'E', 'T', 'E', 'M', 'B', 'D', 'P'};
constexpr std::uint32_t kStateVersion = 1;

}  // namespace detail

struct StateDoc {
  LayeredDPState state;
  SymbolTable network_names;
  SymbolTable computation_names;
};

inline std::string save_state(const LayeredDPState& s, const SymbolTable* network_names = nullptr,
                              const SymbolTable* computation_names = nullptr) {
  detail::BlobWriter w;
  w.raw(detail::kStateMagic, sizeof detail::kStateMagic);
  w.u32(detail::kStateVersion);

  const auto& net = s.network;
  w.u32(static_cast<std::uint32_t>(net.node_count()));
  w.u32(static_cast<std::uint32_t>(net.edges().size()));
  for (const auto& e : net.edges()) {
    w.u32(static_cast<std::uint32_t>(e.u));
    w.u32(static_cast<std::uint32_t>(e.v));
    w.f64(e.weight);
  }
  w.u32(static_cast<std::uint32_t>(net.sources().size()));
  for (NodeId x : net.sources()) w.u32(static_cast<std::uint32_t>(x));
  w.u32(static_cast<std::uint32_t>(net.sink()));

  const auto& cg = s.computation;
  w.u32(static_cast<std::uint32_t>(cg.vertex_count()));
  w.u32(static_cast<std::uint32_t>(cg.edges().size()));
  for (const auto& e : cg.edges()) {
    w.u32(static_cast<std::uint32_t>(e.from));
    w.u32(static_cast<std::uint32_t>(e.to));
    w.f64(e.weight);
  }
  w.u32(static_cast<std::uint32_t>(cg.sources().size()));
  for (VertexId x : cg.sources()) w.u32(static_cast<std::uint32_t>(x));
  w.u32(static_cast<std::uint32_t>(cg.sink()));
  bool source_processing = false;
  for (VertexId x : cg.sources()) {
    for (double v : cg.processing().row(x)) source_processing |= (v != 0.0);
  }
  w.u8(source_processing ? 1 : 0);
  for (int v = 0; v < cg.vertex_count(); ++v) {
    for (double x : cg.processing().row(v)) w.f64(x);
  }

  for (int l : s.layering.layer_of) w.u32(static_cast<std::uint32_t>(l));
  w.u32(static_cast<std::uint32_t>(s.max_width));
  w.u32(static_cast<std::uint32_t>(s.dp_layers.size()));
  for (const auto& layer : s.dp_layers) {
    w.u32(static_cast<std::uint32_t>(layer.size()));
    for (VertexId x : layer) w.u32(static_cast<std::uint32_t>(x));
  }
  w.u32(static_cast<std::uint32_t>(s.absorbed.size()));
  for (const auto& a : s.absorbed) {
    w.u32(static_cast<std::uint32_t>(a.vertex));
    w.u32(static_cast<std::uint32_t>(a.anchor));
    w.f64(a.constant);
  }
  w.u32(static_cast<std::uint32_t>(s.tables.size()));
  for (const auto& t : s.tables) {
    w.u64(t.best.size());
    for (double x : t.best) w.f64(x);
    for (std::uint64_t x : t.argbest) w.u64(x);
  }
  w.f64(s.dp_cost);
  w.f64(s.cost);
  w.u32(static_cast<std::uint32_t>(s.embedding.size()));
  for (NodeId x : s.embedding.image) w.u32(static_cast<std::uint32_t>(x));

  if (network_names && computation_names) {
    w.u8(1);
    for (const SymbolTable* t : {network_names, computation_names}) {
      w.u32(static_cast<std::uint32_t>(t->size()));
      for (const auto& name : t->names()) w.str(name);
    }
  } else {
    w.u8(0);
  }
  return w.take();
}

namespace detail {

inline StateDoc parse_state(const std::string& blob) {
  detail::BlobReader r(blob);
  if (blob.size() < sizeof detail::kStateMagic ||
      std::memcmp(blob.data(), detail::kStateMagic, sizeof detail::kStateMagic) != 0) {
    fail(ErrorKind::StateFormat, "not a DP state file");
  }
  for (std::size_t i = 0; i < sizeof detail::kStateMagic; ++i) r.u8();
  const std::uint32_t version = r.u32();
  if (version != detail::kStateVersion) {
    fail(ErrorKind::StateFormat, "unsupported state version " + std::to_string(version));
  }

  StateDoc doc;
  LayeredDPState& s = doc.state;
  auto id = [&] { return static_cast<int>(r.u32()); };

  const int n = id();
  std::vector<NetworkEdge> net_edges(r.count(16));
  for (auto& e : net_edges) {
    e.u = id();
    e.v = id();
    e.weight = r.f64();
  }
  std::vector<NodeId> net_sources(r.count(4));
  for (auto& x : net_sources) x = id();
  const NodeId net_sink = id();
  // A connected network has at least n - 1 links.
  if (n < 1 || static_cast<std::size_t>(n) > net_edges.size() + 1) {
    fail(ErrorKind::StateFormat, "node count does not match the links");
  }
  s.network = NetworkGraph::build(n, std::move(net_edges), std::move(net_sources), net_sink);

  const int p = id();
  if (p < 2 || static_cast<std::size_t>(p) > r.remaining() / 4) {
    fail(ErrorKind::StateFormat, "vertex count exceeds the state size");
  }
  std::vector<ComputationEdge> cg_edges(r.count(16));
  for (auto& e : cg_edges) {
    e.from = id();
    e.to = id();
    e.weight = r.f64();
  }
  std::vector<VertexId> cg_sources(r.count(4));
  for (auto& x : cg_sources) x = id();
  const VertexId cg_sink = id();
  ComputationGraph::Options opts;
  opts.allow_source_processing = r.u8() != 0;
  if (static_cast<std::size_t>(p) > r.remaining() / 8 / static_cast<std::size_t>(n)) {
    fail(ErrorKind::StateFormat, "truncated state");
  }
  ProcessingTable xi(p, n, 0.0);
  for (int w = 0; w < p; ++w) {
    for (int v = 0; v < n; ++v) xi(w, v) = r.f64();
  }
  s.computation = ComputationGraph::build(p, std::move(cg_edges), std::move(cg_sources), cg_sink,
                                          std::move(xi), opts);

  std::vector<int> layer_of(static_cast<std::size_t>(p));
  for (auto& l : layer_of) l = id();
  s.layering = LayeredStructure::from_assignment(s.computation, std::move(layer_of));
  s.max_width = id();
  s.dp_layers.resize(r.count(4));
  for (auto& layer : s.dp_layers) {
    layer.resize(r.count(4));
    for (auto& x : layer) {
      x = id();
      if (x < 0 || x >= p) fail(ErrorKind::StateFormat, "vertex id out of range");
    }
  }
  s.absorbed.resize(r.count(16));
  for (auto& a : s.absorbed) {
    a.vertex = id();
    a.anchor = id();
    a.constant = r.f64();
    if (a.vertex < 0 || a.vertex >= p || a.anchor < 0 || a.anchor >= p) {
      fail(ErrorKind::StateFormat, "absorbed vertex out of range");
    }
  }
  s.tables.resize(r.count(8));
  for (auto& t : s.tables) {
    const std::size_t size = r.count64(16);
    t.best.resize(size);
    t.argbest.resize(size);
    for (auto& x : t.best) x = r.f64();
    for (auto& x : t.argbest) x = r.u64();
  }
  s.dp_cost = r.f64();
  s.cost = r.f64();
  s.embedding.image.resize(r.count(4));
  for (auto& x : s.embedding.image) x = id();

  if (r.u8() != 0) {
    for (SymbolTable* t : {&doc.network_names, &doc.computation_names}) {
      const std::size_t count = r.count(4);
      for (std::size_t i = 0; i < count; ++i) t->add(r.str());
    }
  } else {
    doc.network_names = SymbolTable::numbered(n);
    doc.computation_names = SymbolTable::numbered(p);
  }
  if (!r.at_end()) fail(ErrorKind::StateFormat, "trailing bytes after state");

  // Structural consistency between the pieces.
  if (static_cast<int>(s.dp_layers.size()) != s.layering.layer_count() ||
      static_cast<int>(s.tables.size()) != s.layering.layer_count() - 1 ||
      s.embedding.size() != p || doc.network_names.size() != n ||
      doc.computation_names.size() != p) {
    fail(ErrorKind::StateFormat, "state sections disagree on sizes");
  }
  // DP layers keep the layering's order minus the absorbed vertices.
  std::vector<char> seen(static_cast<std::size_t>(p), 0);
  for (const auto& a : s.absorbed) {
    if (seen[a.vertex]++) fail(ErrorKind::StateFormat, "vertex absorbed twice");
  }
  for (std::size_t l = 0; l < s.dp_layers.size(); ++l) {
    std::vector<VertexId> expect;
    for (VertexId w : s.layering.layers[l]) {
      if (!seen[w]) expect.push_back(w);
    }
    if (s.dp_layers[l] != expect) fail(ErrorKind::StateFormat, "DP layer " + std::to_string(l + 1) + " disagrees with the layering");
    if (s.dp_layers[l].empty()) fail(ErrorKind::StateFormat, "DP layer " + std::to_string(l + 1) + " is empty");
  }
  if (s.max_width < s.layering.max_width()) fail(ErrorKind::StateFormat, "width limit below the current width");
  const auto model = detail::build_layer_model(s.computation, s.network, s.layering, s.dp_layers);
  for (std::size_t j = 0; j < s.tables.size(); ++j) {
    if (s.tables[j].best.size() != model.domains[j + 1].size()) {
      fail(ErrorKind::StateFormat, "table " + std::to_string(j) + " has the wrong size");
    }
    for (std::uint64_t x : s.tables[j].argbest) {
      if (x >= model.domains[j].size()) fail(ErrorKind::StateFormat, "table pointer out of range");
    }
  }
  for (NodeId x : s.embedding.image) {
    if (x < 0 || x >= n) fail(ErrorKind::StateFormat, "embedding node out of range");
  }
  return doc;
}

}  // namespace detail

/// Anything inconsistent in the blob, including graphs that no longer
/// validate, is reported as StateFormat.
inline StateDoc load_state(const std::string& blob) {
  try {
    return detail::parse_state(blob);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::StateFormat) throw;
    fail(ErrorKind::StateFormat, std::string("state holds an invalid model: ") + e.what());
  }
}

}  // namespace netembed
