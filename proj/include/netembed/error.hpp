#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netembed {

using NodeId = int;    // vertex of the communication network
using VertexId = int;  // vertex of the computation graph

enum class ErrorKind {
  // input validation
  DisconnectedGraph,
  NegativeWeight,
  DuplicateEdge,
  UnknownNodeId,
  SelfLoop,
  InvalidTerminals,
  CyclicGraph,
  InvalidProcessing,
  InvalidEmbedding,
  InvalidDecomposition,
  InvalidEdit,
  DanglingEdit,
  SchemaError,
  StateFormat,
  MaxResamplesExceeded,
  // resource guards
  BudgetExceeded,
  // solver preconditions
  NotATree,
  NotLayered,
  SinkNotLast,
  WidthExceeded,
  PreconditionViolated,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::UnknownNodeId: return "UnknownNodeId";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::InvalidTerminals: return "InvalidTerminals";
    case ErrorKind::CyclicGraph: return "CyclicGraph";
    case ErrorKind::InvalidProcessing: return "InvalidProcessing";
    case ErrorKind::InvalidEmbedding: return "InvalidEmbedding";
    case ErrorKind::InvalidDecomposition: return "InvalidDecomposition";
    case ErrorKind::InvalidEdit: return "InvalidEdit";
    case ErrorKind::DanglingEdit: return "DanglingEdit";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::StateFormat: return "StateFormat";
    case ErrorKind::MaxResamplesExceeded: return "MaxResamplesExceeded";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotATree: return "NotATree";
    case ErrorKind::NotLayered: return "NotLayered";
    case ErrorKind::SinkNotLast: return "SinkNotLast";
    case ErrorKind::WidthExceeded: return "WidthExceeded";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
  }
  return "Unknown";
}

enum class ErrorCategory { Validation, Budget, Precondition };

inline ErrorCategory category(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BudgetExceeded:
      return ErrorCategory::Budget;
    case ErrorKind::NotATree:
    case ErrorKind::NotLayered:
    case ErrorKind::SinkNotLast:
    case ErrorKind::WidthExceeded:
    case ErrorKind::PreconditionViolated:
      return ErrorCategory::Precondition;
    default:
      return ErrorCategory::Validation;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries the connected components so callers can name them.
class DisconnectedGraphError : public Error {
 public:
  DisconnectedGraphError(const std::string& message,
                         std::vector<std::vector<NodeId>> components)
      : Error(ErrorKind::DisconnectedGraph, message),
        components_(std::move(components)) {}

  const std::vector<std::vector<NodeId>>& components() const noexcept {
    return components_;
  }

 private:
  std::vector<std::vector<NodeId>> components_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace netembed
