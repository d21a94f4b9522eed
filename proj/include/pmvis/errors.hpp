#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmvis {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

/// Database loading failures.
class StoreError : public Error {
 public:
  enum class Kind {
    MissingSchema,
    MissingTableFile,
    TypeCoercion,
    DuplicateTableName,
    DuplicateColumnName,
    InvalidForeignKey,
    BadSchema,
    BadCsv,
  };

  StoreError(Kind kind, std::string msg) : Error(std::move(msg)), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Raised by the parser; the negative verdict of the syntax tool.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string msg)
      : Error("syntax error at " + std::to_string(position) + ": " + msg),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// An unqualified column name resolves to more than one bound table.
class AmbiguousColumn : public Error {
 public:
  explicit AmbiguousColumn(const std::string& column)
      : Error("ambiguous column: " + column + " (qualify it with a table name)") {}
};

/// A table referenced by the query is not bound in the catalog.
class UnknownTable : public Error {
 public:
  explicit UnknownTable(const std::string& table)
      : Error("unknown table: " + table) {}
};

/// Precondition breach on execute(): the caller skipped syntax or schema
/// validation. This is the failure the tool-precedence gate exists to prevent.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(std::string msg)
      : Error("contract violation: " + std::move(msg)) {}
};

/// Semantic failure while executing a well-grounded query.
class ExecutionError : public Error {
 public:
  enum class Kind {
    AggregateOverText,
    HavingWithoutGroupBy,
    NonGroupedColumn,
    AggregateOrderWithoutGroupBy,
    UnsupportedBin,
    TypeMismatch,
    UnboundJoinReference,
  };

  ExecutionError(Kind kind, std::string msg) : Error(std::move(msg)), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Chart emission requested for a clause set / result that is not renderable.
class NotRenderable : public Error {
 public:
  explicit NotRenderable(std::string msg) : Error(std::move(msg)) {}
};

/// Source VQL handed to the trajectory generator fails its preconditions.
class SourceInvalid : public Error {
 public:
  explicit SourceInvalid(std::string msg) : Error(std::move(msg)) {}
};

/// Even the maximal masking chain is shorter than the configured minimum.
class TooShort : public Error {
 public:
  TooShort(int got, int want)
      : Error("trajectory has " + std::to_string(got) + " rounds, minimum is " +
              std::to_string(want)),
        rounds_(got) {}
  int rounds() const { return rounds_; }

 private:
  int rounds_;
};

/// Failure talking to (or scripted gap in) an LLM client.
class LlmError : public Error {
 public:
  explicit LlmError(std::string msg) : Error(std::move(msg)) {}
};

/// No fenced VQL block found in an LLM reply.
class ExtractionError : public Error {
 public:
  explicit ExtractionError(std::string msg) : Error(std::move(msg)) {}
};

/// 1-based round index outside the trajectory.
class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(std::string msg) : Error(std::move(msg)) {}
};

/// The gold side of a score pair fails to parse or execute.
class GoldInvalid : public Error {
 public:
  explicit GoldInvalid(std::string msg) : Error(std::move(msg)) {}
};

}  // namespace pmvis
