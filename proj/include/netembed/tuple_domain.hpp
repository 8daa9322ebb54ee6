#pragma once

// Mixed-radix indexing of assignment tuples. A tuple assigns a network node to
// each position; pinned positions are constant, free positions range over all
// n nodes. The first free position is the most significant digit.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "netembed/error.hpp"

namespace netembed {

/// n^k, or max() when the product exceeds `cap`.
inline std::uint64_t checked_power(std::uint64_t n, int k, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) {
    if (n != 0 && r > cap / n) return std::numeric_limits<std::uint64_t>::max();
    r *= n;
  }
  return r;
}

class AssignmentDomain {
 public:
  AssignmentDomain() = default;

  /// `pinned[i]` is the fixed node of position i, or -1 when free.
  AssignmentDomain(int node_count, std::vector<NodeId> pinned)
      : n_(node_count), pinned_(std::move(pinned)) {
    for (std::size_t i = 0; i < pinned_.size(); ++i) {
      if (pinned_[i] < 0) free_.push_back(static_cast<int>(i));
    }
    size_ = checked_power(static_cast<std::uint64_t>(n_), static_cast<int>(free_.size()),
                          std::numeric_limits<std::uint64_t>::max());
  }

  int positions() const noexcept { return static_cast<int>(pinned_.size()); }
  int free_positions() const noexcept { return static_cast<int>(free_.size()); }
  const std::vector<NodeId>& pinned() const noexcept { return pinned_; }
  std::uint64_t size() const noexcept { return size_; }

  void decode(std::uint64_t index, std::vector<NodeId>& tuple) const {
    tuple = pinned_;
    for (int j = static_cast<int>(free_.size()) - 1; j >= 0; --j) {
      tuple[free_[j]] = static_cast<NodeId>(index % static_cast<std::uint64_t>(n_));
      index /= static_cast<std::uint64_t>(n_);
    }
  }

  std::vector<NodeId> decode(std::uint64_t index) const {
    std::vector<NodeId> t;
    decode(index, t);
    return t;
  }

  /// Index of a tuple; pinned positions must hold their pinned node.
  std::uint64_t encode(const std::vector<NodeId>& tuple) const {
    std::uint64_t index = 0;
    for (int pos : free_) index = index * static_cast<std::uint64_t>(n_) + tuple[pos];
    return index;
  }

  /// Throws BudgetExceeded when the domain holds more than `budget` tuples.
  void require_within(std::uint64_t budget, const std::string& what) const {
    if (size_ > budget) {
      fail(ErrorKind::BudgetExceeded,
           what + ": " + std::to_string(n_) + "^" + std::to_string(free_.size()) +
               " assignments exceed budget " + std::to_string(budget));
    }
  }

 private:
  int n_ = 0;
  std::vector<NodeId> pinned_;
  std::vector<int> free_;
  std::uint64_t size_ = 1;
};

}  // namespace netembed
