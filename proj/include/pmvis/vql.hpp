#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pmvis/database.hpp"
#include "pmvis/value.hpp"

namespace pmvis {

enum class ChartType { Bar, Pie, Line, Scatter };
enum class ClauseKind {
  Visualize,
  Select,
  From,
  Join,
  Where,
  GroupBy,
  Having,
  OrderBy,
  Limit,
  BinBy,
};
enum class AggFn { Count, Sum, Avg, Min, Max };
enum class BinInterval { Year, Month, Day, Weekday };

std::string to_keyword(ChartType t);
std::string to_keyword(ClauseKind k);
std::string to_keyword(AggFn f);
std::string to_keyword(BinInterval b);

/// Identifier with original casing preserved for display and a lowercase key
/// for all comparisons.
struct Ident {
  std::string display;
  std::string key;

  static Ident of(std::string text);
  bool operator==(const Ident& o) const { return key == o.key; }
  bool operator<(const Ident& o) const { return key < o.key; }
};

struct ColumnRef {
  std::optional<Ident> qualifier;  // table name or alias
  Ident column;
  bool operator==(const ColumnRef& o) const {
    return qualifier == o.qualifier && column == o.column;
  }
};

struct AggCall {
  AggFn fn = AggFn::Count;
  bool star = false;      // COUNT(*)
  bool distinct = false;  // e.g. COUNT(DISTINCT col)
  ColumnRef col;          // meaningful when !star
  bool operator==(const AggCall& o) const {
    return fn == o.fn && star == o.star && distinct == o.distinct &&
           (star || col == o.col);
  }
};

/// One projected item: `*`, a bare column, or an aggregate call.
struct SelectItem {
  bool star = false;
  std::optional<AggCall> agg;
  ColumnRef col;
  bool operator==(const SelectItem& o) const {
    if (star != o.star || agg.has_value() != o.agg.has_value()) return false;
    if (star) return true;
    if (agg) return *agg == *o.agg;
    return col == o.col;
  }
};

struct SelectClause {
  bool distinct = false;
  std::vector<SelectItem> items;
  bool operator==(const SelectClause&) const = default;
};

struct TableRef {
  Ident table;
  std::optional<Ident> alias;
  bool operator==(const TableRef&) const = default;
  const Ident& binding() const { return alias ? *alias : table; }
};

struct FromClause {
  TableRef table;
  bool operator==(const FromClause&) const = default;
};

struct JoinClause {
  TableRef table;
  ColumnRef left, right;  // equality condition
  bool operator==(const JoinClause&) const = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

/// Predicate operand: column, literal, or (in HAVING / ORDER BY) aggregate.
using Operand = std::variant<ColumnRef, Value, AggCall>;

struct Pred;
using PredPtr = std::shared_ptr<const Pred>;

struct Comparison {
  Operand lhs;
  CmpOp op = CmpOp::Eq;
  Operand rhs;
};
struct InList {
  Operand lhs;
  std::vector<Value> items;
  bool negated = false;
};
struct LikePred {
  Operand lhs;
  std::string pattern;
  bool negated = false;
};
struct BetweenPred {
  Operand lhs;
  Value lo, hi;
  bool negated = false;
};
struct AndPred {
  PredPtr lhs, rhs;
};
struct OrPred {
  PredPtr lhs, rhs;
};
struct NotPred {
  PredPtr inner;
};

struct Pred {
  std::variant<Comparison, InList, LikePred, BetweenPred, AndPred, OrPred,
               NotPred>
      node;
};

bool pred_equal(const PredPtr& a, const PredPtr& b);
bool operand_equal(const Operand& a, const Operand& b);

struct WhereClause {
  PredPtr pred;
  bool operator==(const WhereClause& o) const { return pred_equal(pred, o.pred); }
};

struct GroupByClause {
  std::vector<ColumnRef> cols;
  bool operator==(const GroupByClause&) const = default;
};

struct HavingClause {
  PredPtr pred;
  bool operator==(const HavingClause& o) const { return pred_equal(pred, o.pred); }
};

struct OrderKey {
  std::variant<ColumnRef, AggCall> expr;
  bool ascending = true;  // ASC is the default and is explicit in canonical text
  bool operator==(const OrderKey&) const = default;
};

struct OrderByClause {
  std::vector<OrderKey> keys;
  bool operator==(const OrderByClause&) const = default;
};

struct LimitClause {
  std::int64_t n = 0;
  bool operator==(const LimitClause&) const = default;
};

struct BinByClause {
  ColumnRef col;
  BinInterval interval = BinInterval::Year;
  bool operator==(const BinByClause&) const = default;
};

struct VisualizeClause {
  ChartType chart = ChartType::Bar;
  bool operator==(const VisualizeClause&) const = default;
};

/// A clause with its payload, the unit of masking and NLQ deltas.
struct Clause {
  std::variant<VisualizeClause, SelectClause, FromClause, JoinClause,
               WhereClause, GroupByClause, HavingClause, OrderByClause,
               LimitClause, BinByClause>
      payload;
  ClauseKind kind() const;
  bool operator==(const Clause&) const = default;
};

/// Identifies one clause inside a ClauseSet. JOIN clauses form an ordered
/// list, so they carry an index.
struct ClauseRef {
  ClauseKind kind = ClauseKind::Select;
  std::size_t join_index = 0;
  bool operator==(const ClauseRef&) const = default;
};

/// Decomposed VQL. SELECT and FROM are always present; JOIN repeats; every
/// other clause appears at most once. HAVING implies GROUP BY.
struct ClauseSet {
  std::optional<VisualizeClause> visualize;
  SelectClause select;
  FromClause from;
  std::vector<JoinClause> joins;
  std::optional<WhereClause> where;
  std::optional<GroupByClause> group_by;
  std::optional<HavingClause> having;
  std::optional<OrderByClause> order_by;
  std::optional<LimitClause> limit;
  std::optional<BinByClause> bin_by;

  bool operator==(const ClauseSet&) const = default;

  /// All clauses in canonical order.
  std::vector<ClauseRef> all_clauses() const;
  std::size_t clause_count() const { return all_clauses().size(); }
  bool contains(const ClauseRef& ref) const;
  Clause get(const ClauseRef& ref) const;
  /// Copy without the referenced clause. Core clauses cannot be removed.
  ClauseSet without(const ClauseRef& ref) const;

  /// Alias/table bindings introduced by FROM and JOIN, in clause order.
  std::vector<TableRef> table_refs() const;
};

/// Metric decomposition: chart type, projected axis items, and the residual
/// data-transformation clauses.
struct DataClauses {
  FromClause from;
  std::vector<JoinClause> joins;
  std::optional<WhereClause> where;
  std::optional<GroupByClause> group_by;
  std::optional<HavingClause> having;
  std::optional<OrderByClause> order_by;
  std::optional<LimitClause> limit;
  std::optional<BinByClause> bin_by;
  bool operator==(const DataClauses&) const = default;
};

struct VqlComponents {
  std::optional<ChartType> vis;
  std::vector<SelectItem> axis;
  bool axis_distinct = false;
  DataClauses data;
};

// --- parsing and assembly -------------------------------------------------

/// Parses VQL text into a ClauseSet. Throws SyntaxError with the offending
/// position; that error is the negative verdict of the syntax validator.
ClauseSet parse(const std::string& text);

/// Canonical text: fixed clause order, single spaces, uppercase keywords,
/// explicit ASC, and one display casing per identifier (first occurrence in
/// clause order wins).
std::string assemble(const ClauseSet& c);

/// Canonical text of a single clause (same rendering as assemble).
std::string clause_text(const Clause& c);

/// Canonical text of one SELECT item; result-column labels use this.
std::string select_item_text(const SelectItem& item);

// --- clause / column algebra ----------------------------------------------

struct MaskPolicy {
  bool maskable_visualize = false;  // VISUALIZE is core unless configured
};

/// Clauses eligible for masking: everything except SELECT, FROM and
/// (by default) VISUALIZE.
std::vector<ClauseRef> optional_clauses(const ClauseSet& c,
                                        const MaskPolicy& policy = {});

/// Prerequisite clause kinds that must survive whenever `c` survives:
/// HAVING needs GROUP BY; ORDER BY over an aggregate needs GROUP BY.
std::set<ClauseKind> prerequisites(const Clause& c);

/// Every column mentioned in any clause, resolved against FROM/JOIN bindings
/// to lowercase `table.column`. `*` contributes nothing. Columns qualified
/// by an unbound name pass through verbatim; unqualified columns with several
/// bound tables raise AmbiguousColumn.
std::set<std::string> referenced_columns(const ClauseSet& c);

/// The raw column references in clause order, unresolved and with their
/// original casing (diagnostics want the text the user wrote).
std::vector<ColumnRef> column_references(const ClauseSet& c);

/// Catalog columns of the tables bound by FROM/JOIN, lowercase-qualified.
std::set<std::string> bound_columns(const ClauseSet& c, const Database& db);

/// Tables named by FROM/JOIN, lowercase.
std::set<std::string> referenced_tables(const ClauseSet& c);

VqlComponents components(const ClauseSet& c);
ClauseSet recombine(const VqlComponents& parts);

}  // namespace pmvis
