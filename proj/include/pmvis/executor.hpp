#pragma once

#include <string>
#include <vector>

#include "pmvis/database.hpp"
#include "pmvis/vql.hpp"

namespace pmvis {

struct ResultColumn {
  std::string label;      // SELECT item text
  ColumnType type;        // statically inferred
  bool operator==(const ResultColumn&) const = default;
};

/// Rectangular execution result. `ordered` records whether row order is part
/// of the result's meaning (ORDER BY or LIMIT present): ordered tables
/// compare as sequences, unordered ones as multisets.
struct ResultTable {
  std::vector<ResultColumn> columns;
  std::vector<Row> rows;
  bool ordered = false;
};

/// Executes the SQL part of a VQL over the database.
///
/// Preconditions (the safety obligations of the validation gate): the clause
/// set is schema-grounded — referenced tables and columns all exist in the
/// catalog. A breach raises ContractViolation, never a crash or a silent
/// empty result. Semantic faults inside a grounded query (aggregating text,
/// mixing grouped and ungrouped columns, ...) raise ExecutionError.
///
/// Semantics: FROM/JOIN build the row universe via inner equality joins,
/// WHERE filters with three-valued logic, GROUP BY partitions (groups appear
/// in first-occurrence order), aggregates fold per group (COUNT ignores
/// Nulls except COUNT(*)), HAVING filters groups, ORDER BY is a stable sort
/// with Null first ascending, LIMIT truncates, SELECT projects in item
/// order, and SELECT DISTINCT dedupes the projected rows last, keeping first
/// occurrences.
ResultTable execute(const ClauseSet& c, const Database& db);

/// VF gate: |execute(c, db)| > 0. Propagates execute errors.
bool non_empty(const ClauseSet& c, const Database& db);

}  // namespace pmvis
