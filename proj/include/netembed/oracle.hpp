#pragma once

// Exhaustive enumeration of embeddings; the ground truth for every solver.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "netembed/metrics.hpp"
#include "netembed/tuple_domain.hpp"

namespace netembed {

struct EnumerationOptions {
  std::uint64_t budget = 10'000'000;
  bool reverse = false;  // walk the stream back to front
  int threads = 1;
};

/// Every embedding, in lexicographic order of the free-vertex images (free
/// vertices taken in increasing id).
class EmbeddingEnumerator {
 public:
  EmbeddingEnumerator(const ComputationGraph& cg, const NetworkGraph& net,
                      EnumerationOptions options = {})
      : options_(options) {
    check_compatible(cg, net);
    std::vector<NodeId> pinned(static_cast<std::size_t>(cg.vertex_count()), -1);
    for (std::size_t i = 0; i < cg.sources().size(); ++i) {
      pinned[cg.sources()[i]] = net.sources()[i];
    }
    pinned[cg.sink()] = net.sink();
    domain_ = AssignmentDomain(net.node_count(), std::move(pinned));
    domain_.require_within(options_.budget, "embedding enumeration");
  }

  std::uint64_t count() const noexcept { return domain_.size(); }
  const AssignmentDomain& domain() const noexcept { return domain_; }

  /// Calls visit(rank, embedding) for ranks in [begin, end) of the ordered stream.
  template <class Visit>
  void visit_range(std::uint64_t begin, std::uint64_t end, Visit&& visit) const {
    Embedding e;
    for (std::uint64_t rank = begin; rank < end; ++rank) {
      const std::uint64_t index = options_.reverse ? count() - 1 - rank : rank;
      domain_.decode(index, e.image);
      visit(rank, static_cast<const Embedding&>(e));
    }
  }

  template <class Visit>
  void visit_all(Visit&& visit) const {
    visit_range(0, count(), std::forward<Visit>(visit));
  }

  std::vector<Embedding> collect() const {
    std::vector<Embedding> out;
    out.reserve(static_cast<std::size_t>(count()));
    visit_all([&](std::uint64_t, const Embedding& e) { out.push_back(e); });
    return out;
  }

  const EnumerationOptions& options() const noexcept { return options_; }

 private:
  EnumerationOptions options_;
  AssignmentDomain domain_;
};

inline void enumerate_embeddings(const ComputationGraph& cg, const NetworkGraph& net,
                                 const std::function<void(const Embedding&)>& visit,
                                 EnumerationOptions options = {}) {
  EmbeddingEnumerator(cg, net, options).visit_all(
      [&](std::uint64_t, const Embedding& e) { visit(e); });
}

/// Eq. 1 total with the topological order and buffers prepared once.
class DelayEvaluator {
 public:
  DelayEvaluator(const ComputationGraph& cg, const DistanceMatrix& dm)
      : cg_(cg), dm_(dm), order_(cg.topological_order()), d_(cg.vertex_count(), 0.0) {}

  double total(const Embedding& e) {
    for (VertexId w : order_) {
      if (cg_.is_source(w)) {
        d_[w] = 0.0;
        continue;
      }
      double arrival = 0.0;
      for (int id : cg_.in_edges(w)) {
        const auto& edge = cg_.edges()[id];
        arrival = std::max(arrival, d_[edge.from] + edge.weight * dm_(e[edge.from], e[w]));
      }
      d_[w] = arrival + cg_.processing(w, e[w]);
    }
    return d_[cg_.sink()];
  }

 private:
  const ComputationGraph& cg_;
  const DistanceMatrix& dm_;
  std::vector<VertexId> order_;
  std::vector<double> d_;
};

namespace detail {

struct Candidate {
  std::optional<Embedding> embedding;
  double value = 0.0;
};

/// Splits the stream into contiguous chunks by leading image and keeps the
/// first strict minimum; chunks merge in stream order so the answer does not
/// depend on the thread count.
template <class MakeScorer>
Candidate parallel_minimum(const EmbeddingEnumerator& en, MakeScorer make_scorer) {
  const std::uint64_t total = en.count();
  const int threads = std::max(1, en.options().threads);
  const std::uint64_t chunks = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), total);
  std::vector<Candidate> best(static_cast<std::size_t>(std::max<std::uint64_t>(chunks, 1)));

  auto run = [&](std::uint64_t c) {
    auto score = make_scorer();
    const std::uint64_t begin = total * c / chunks;
    const std::uint64_t end = total * (c + 1) / chunks;
    Candidate& mine = best[c];
    en.visit_range(begin, end, [&](std::uint64_t, const Embedding& e) {
      const double v = score(e);
      if (!mine.embedding || v < mine.value) {
        mine.value = v;
        mine.embedding = e;
      }
    });
  };

  if (chunks <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t c = 0; c < chunks; ++c) pool.emplace_back(run, c);
    for (auto& t : pool) t.join();
  }

  Candidate out;
  for (auto& c : best) {
    if (c.embedding && (!out.embedding || c.value < out.value)) out = std::move(c);
  }
  return out;
}

}  // namespace detail

inline CostResult brute_force_min_cost(const ComputationGraph& cg, const NetworkGraph& net,
                                       const DistanceMatrix& dm,
                                       EnumerationOptions options = {}) {
  EmbeddingEnumerator en(cg, net, options);
  auto best = detail::parallel_minimum(en, [&] {
    return [&](const Embedding& e) { return embedding_cost(cg, dm, e); };
  });
  return {std::move(*best.embedding), best.value};
}

inline DelayResult brute_force_min_delay(const ComputationGraph& cg, const NetworkGraph& net,
                                         const DistanceMatrix& dm,
                                         EnumerationOptions options = {}) {
  EmbeddingEnumerator en(cg, net, options);
  auto best = detail::parallel_minimum(en, [&] {
    return [eval = DelayEvaluator(cg, dm)](const Embedding& e) mutable { return eval.total(e); };
  });
  DelayResult out;
  out.embedding = std::move(*best.embedding);
  out.report = embedding_delay(cg, dm, out.embedding);
  out.objective = best.value;
  return out;
}

}  // namespace netembed
