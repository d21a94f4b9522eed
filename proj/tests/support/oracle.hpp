#pragma once

#include "pmvis/database.hpp"
#include "pmvis/executor.hpp"
#include "pmvis/vql.hpp"

namespace pmvis::testing {

/// Brute-force reference evaluator, independent of pmvis::execute: full
/// cross product of the referenced tables, join conditions and WHERE applied
/// row by row, groups formed by linear scan in first-occurrence order,
/// aggregates folded naively, stable ordering with Null first ascending.
struct OracleResult {
  std::vector<Row> rows;
  bool ordered = false;
};

OracleResult oracle_execute(const ClauseSet& c, const Database& db);

/// Multiset equality (or sequence equality when the query is ordered)
/// between the oracle rows and an engine result.
bool oracle_matches(const OracleResult& expected, const ResultTable& actual);

}  // namespace pmvis::testing
