#include "pmvis/executor.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>

#include "pmvis/errors.hpp"
#include "pmvis/text_util.hpp"

namespace pmvis {

namespace {

/// Kleene three-valued truth for predicates over Nulls.
enum class Tri { False, True, Unknown };

Tri tri_not(Tri t) {
  if (t == Tri::Unknown) return Tri::Unknown;
  return t == Tri::True ? Tri::False : Tri::True;
}
Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::True && b == Tri::True) return Tri::True;
  return Tri::Unknown;
}
Tri tri_or(Tri a, Tri b) {
  if (a == Tri::True || b == Tri::True) return Tri::True;
  if (a == Tri::False && b == Tri::False) return Tri::False;
  return Tri::Unknown;
}
Tri tri_of(bool b) { return b ? Tri::True : Tri::False; }

struct Binding {
  std::string name;   // alias or table key
  const Table* table;
  std::size_t offset;  // first universe column index
};

struct Universe {
  std::vector<Binding> binds;
  std::vector<const ColumnMeta*> columns;  // flattened
  std::vector<Row> rows;

  /// Resolves a column reference to a universe index. Grounding was already
  /// verified, so failures here are contract breaches.
  std::size_t resolve(const ColumnRef& ref) const {
    if (ref.qualifier) {
      for (const auto& b : binds) {
        if (b.name != ref.qualifier->key) continue;
        int idx = b.table->column_index(ref.column.key);
        if (idx >= 0) return b.offset + static_cast<std::size_t>(idx);
      }
      throw ContractViolation("unresolved column " + ref.qualifier->display +
                              "." + ref.column.display);
    }
    std::optional<std::size_t> found;
    for (const auto& b : binds) {
      int idx = b.table->column_index(ref.column.key);
      if (idx < 0) continue;
      if (found && *found != b.offset + static_cast<std::size_t>(idx))
        throw ContractViolation("ambiguous column " + ref.column.display);
      found = b.offset + static_cast<std::size_t>(idx);
    }
    if (!found) throw ContractViolation("unresolved column " + ref.column.display);
    return *found;
  }
};

Universe build_universe(const ClauseSet& c, const Database& db) {
  Universe u;
  auto add_binding = [&](const TableRef& ref) {
    const Table* t = db.find_table(ref.table.key);
    if (!t) throw ContractViolation("unknown table " + ref.table.display);
    u.binds.push_back({ref.binding().key, t, u.columns.size()});
    for (const auto& col : t->columns) u.columns.push_back(&col);
  };

  add_binding(c.from.table);
  for (const auto& row : u.binds[0].table->rows) u.rows.push_back(row);

  for (const auto& join : c.joins) {
    add_binding(join.table);
    const Table* right = u.binds.back().table;
    std::size_t left_width = u.binds.back().offset;
    // Resolve condition sides against the bindings made so far. The schema
    // precheck sees the whole query, so a failure here means the condition
    // reaches forward to a table joined later: a semantic fault, not a
    // grounding breach.
    std::size_t li, ri;
    try {
      li = u.resolve(join.left);
      ri = u.resolve(join.right);
    } catch (const ContractViolation&) {
      throw ExecutionError(
          ExecutionError::Kind::UnboundJoinReference,
          "join condition references a table that is joined later");
    }
    std::vector<Row> joined;
    for (const auto& lrow : u.rows) {
      for (const auto& rrow : right->rows) {
        auto cell = [&](std::size_t idx) -> const Value& {
          return idx < left_width ? lrow[idx] : rrow[idx - left_width];
        };
        auto cmp = compare_for_predicate(cell(li), cell(ri));
        if (!cmp || *cmp != 0) continue;
        Row combined = lrow;
        combined.insert(combined.end(), rrow.begin(), rrow.end());
        joined.push_back(std::move(combined));
      }
    }
    u.rows = std::move(joined);
  }
  return u;
}

// --- aggregate folding ------------------------------------------------------

struct AggSpec {
  AggFn fn;
  bool star;
  bool distinct;
  std::size_t col = 0;            // universe index when !star
  ColumnType col_type = ColumnType::Text;
};

ColumnType agg_result_type(const AggSpec& a) {
  switch (a.fn) {
    case AggFn::Count: return ColumnType::Integer;
    case AggFn::Sum:
      return a.col_type == ColumnType::Integer ? ColumnType::Integer
                                               : ColumnType::Real;
    case AggFn::Avg: return ColumnType::Real;
    case AggFn::Min:
    case AggFn::Max: return a.col_type;
  }
  return ColumnType::Text;
}

Value fold_aggregate(const AggSpec& a, const std::vector<const Row*>& rows) {
  if (a.fn == AggFn::Count && a.star)
    return Value(static_cast<std::int64_t>(rows.size()));

  std::vector<Value> vals;
  vals.reserve(rows.size());
  for (const Row* r : rows) {
    const Value& v = (*r)[a.col];
    if (!v.is_null()) vals.push_back(v);
  }
  if (a.distinct) {
    std::vector<Value> uniq;
    for (const auto& v : vals) {
      bool seen = false;
      for (const auto& u : uniq)
        if (u == v) {
          seen = true;
          break;
        }
      if (!seen) uniq.push_back(v);
    }
    vals = std::move(uniq);
  }

  switch (a.fn) {
    case AggFn::Count:
      return Value(static_cast<std::int64_t>(vals.size()));
    case AggFn::Sum: {
      if (a.col_type == ColumnType::Text)
        throw ExecutionError(ExecutionError::Kind::AggregateOverText,
                             "SUM over text column");
      if (vals.empty()) return Value::null();
      if (a.col_type == ColumnType::Integer) {
        std::int64_t s = 0;
        for (const auto& v : vals) s += v.as_integer();
        return Value(s);
      }
      double s = 0;
      for (const auto& v : vals) s += v.numeric();
      return Value(s);
    }
    case AggFn::Avg: {
      if (a.col_type == ColumnType::Text)
        throw ExecutionError(ExecutionError::Kind::AggregateOverText,
                             "AVG over text column");
      if (vals.empty()) return Value::null();
      double s = 0;
      for (const auto& v : vals) s += v.numeric();
      return Value(s / static_cast<double>(vals.size()));
    }
    case AggFn::Min:
    case AggFn::Max: {
      if (vals.empty()) return Value::null();
      const Value* best = &vals[0];
      for (const auto& v : vals) {
        int cmp = compare_values(v, *best);
        if ((a.fn == AggFn::Min && cmp < 0) || (a.fn == AggFn::Max && cmp > 0))
          best = &v;
      }
      return *best;
    }
  }
  return Value::null();
}

// --- execution context ------------------------------------------------------

struct ExecContext {
  const Universe& u;
  bool grouped;
  std::vector<std::size_t> group_cols;  // universe indices

  AggSpec make_spec(const AggCall& call) const {
    AggSpec spec{call.fn, call.star, call.distinct, 0, ColumnType::Text};
    if (!call.star) {
      spec.col = u.resolve(call.col);
      spec.col_type = u.columns[spec.col]->declared_type;
    }
    return spec;
  }

  bool is_group_col(std::size_t idx) const {
    return std::find(group_cols.begin(), group_cols.end(), idx) !=
           group_cols.end();
  }
};

/// One output unit: a plain row, or a group with its member rows.
struct Unit {
  const Row* row = nullptr;              // non-grouped
  std::vector<const Row*> members;       // grouped
  const Row* representative() const {
    return row ? row : members.front();
  }
};

Value eval_operand(const ExecContext& ctx, const Unit& unit, const Operand& op,
                   bool aggregate_context) {
  if (const auto* v = std::get_if<Value>(&op)) return *v;
  if (const auto* call = std::get_if<AggCall>(&op)) {
    if (!aggregate_context)
      throw ExecutionError(ExecutionError::Kind::NonGroupedColumn,
                           "aggregate outside grouped context");
    return fold_aggregate(ctx.make_spec(*call), unit.members);
  }
  const auto& col = std::get<ColumnRef>(op);
  std::size_t idx = ctx.u.resolve(col);
  if (aggregate_context && !ctx.is_group_col(idx))
    throw ExecutionError(ExecutionError::Kind::NonGroupedColumn,
                         "column " + col.column.display +
                             " is neither grouped nor aggregated");
  return (*unit.representative())[idx];
}

Tri eval_pred(const ExecContext& ctx, const Unit& unit, const PredPtr& p,
              bool aggregate_context) {
  return std::visit(
      [&](const auto& x) -> Tri {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          Value l = eval_operand(ctx, unit, x.lhs, aggregate_context);
          Value r = eval_operand(ctx, unit, x.rhs, aggregate_context);
          auto cmp = compare_for_predicate(l, r);
          if (!cmp) return Tri::Unknown;
          switch (x.op) {
            case CmpOp::Eq: return tri_of(*cmp == 0);
            case CmpOp::Ne: return tri_of(*cmp != 0);
            case CmpOp::Lt: return tri_of(*cmp < 0);
            case CmpOp::Le: return tri_of(*cmp <= 0);
            case CmpOp::Gt: return tri_of(*cmp > 0);
            case CmpOp::Ge: return tri_of(*cmp >= 0);
          }
          return Tri::Unknown;
        } else if constexpr (std::is_same_v<T, InList>) {
          Value l = eval_operand(ctx, unit, x.lhs, aggregate_context);
          Tri hit = Tri::False;
          for (const auto& item : x.items) {
            auto cmp = compare_for_predicate(l, item);
            hit = tri_or(hit, cmp ? tri_of(*cmp == 0) : Tri::Unknown);
          }
          return x.negated ? tri_not(hit) : hit;
        } else if constexpr (std::is_same_v<T, LikePred>) {
          Value l = eval_operand(ctx, unit, x.lhs, aggregate_context);
          if (l.is_null()) return Tri::Unknown;
          if (!l.is_text())
            throw ExecutionError(ExecutionError::Kind::TypeMismatch,
                                 "LIKE needs a text operand");
          Tri hit = tri_of(like_match(l.as_text(), x.pattern));
          return x.negated ? tri_not(hit) : hit;
        } else if constexpr (std::is_same_v<T, BetweenPred>) {
          Value l = eval_operand(ctx, unit, x.lhs, aggregate_context);
          auto lo = compare_for_predicate(l, x.lo);
          auto hi = compare_for_predicate(l, x.hi);
          Tri in = tri_and(lo ? tri_of(*lo >= 0) : Tri::Unknown,
                           hi ? tri_of(*hi <= 0) : Tri::Unknown);
          return x.negated ? tri_not(in) : in;
        } else if constexpr (std::is_same_v<T, AndPred>) {
          return tri_and(eval_pred(ctx, unit, x.lhs, aggregate_context),
                         eval_pred(ctx, unit, x.rhs, aggregate_context));
        } else if constexpr (std::is_same_v<T, OrPred>) {
          return tri_or(eval_pred(ctx, unit, x.lhs, aggregate_context),
                        eval_pred(ctx, unit, x.rhs, aggregate_context));
        } else {
          return tri_not(eval_pred(ctx, unit, x.inner, aggregate_context));
        }
      },
      p->node);
}

// --- projection --------------------------------------------------------------

struct ProjectedItem {
  std::string label;
  ColumnType type;
  bool is_agg;
  AggSpec agg{AggFn::Count, true, false};
  std::size_t col = 0;
};

std::vector<ProjectedItem> plan_projection(const ClauseSet& c,
                                           const ExecContext& ctx) {
  std::vector<ProjectedItem> plan;
  auto add_plain = [&](std::size_t idx, const std::string& label) {
    if (ctx.grouped && !ctx.is_group_col(idx))
      throw ExecutionError(ExecutionError::Kind::NonGroupedColumn,
                           "column " + label + " is neither grouped nor aggregated");
    plan.push_back({label, ctx.u.columns[idx]->declared_type, false, {}, idx});
  };
  for (const auto& item : c.select.items) {
    if (item.star) {
      for (std::size_t i = 0; i < ctx.u.columns.size(); ++i)
        add_plain(i, ctx.u.columns[i]->name);
      continue;
    }
    std::string label = select_item_text(item);
    if (item.agg) {
      AggSpec spec = ctx.make_spec(*item.agg);
      plan.push_back({label, agg_result_type(spec), true, spec, 0});
    } else {
      add_plain(ctx.u.resolve(item.col), label);
    }
  }
  return plan;
}

// --- ordering ----------------------------------------------------------------

struct SortKey {
  bool ascending;
  bool is_agg;
  AggSpec agg{AggFn::Count, true, false};
  std::size_t col = 0;
};

Value key_value(const ExecContext& ctx, const Unit& unit, const SortKey& k) {
  if (k.is_agg) return fold_aggregate(k.agg, unit.members);
  if (ctx.grouped && !ctx.is_group_col(k.col))
    throw ExecutionError(ExecutionError::Kind::NonGroupedColumn,
                         "ORDER BY column is neither grouped nor aggregated");
  return (*unit.representative())[k.col];
}

}  // namespace

ResultTable execute(const ClauseSet& c, const Database& db) {
  // Corollary-1 obligations: schema-grounded or ContractViolation.
  std::set<std::string> refs;
  try {
    refs = referenced_columns(c);
  } catch (const AmbiguousColumn& e) {
    throw ContractViolation(e.what());
  }
  const auto tables = table_names(db);
  for (const auto& t : referenced_tables(c))
    if (!tables.count(t)) throw ContractViolation("unknown table " + t);
  const auto catalog = column_names(db);
  for (const auto& col : refs)
    if (!catalog.count(col)) throw ContractViolation("unknown column " + col);

  if (c.bin_by)
    throw ExecutionError(ExecutionError::Kind::UnsupportedBin,
                         "BIN BY is not executable over this store");
  if (c.having && !c.group_by)
    throw ExecutionError(ExecutionError::Kind::HavingWithoutGroupBy,
                         "HAVING requires GROUP BY");

  Universe u = build_universe(c, db);

  ExecContext ctx{u, false, {}};

  // WHERE before any grouping.
  std::vector<Row> filtered;
  if (c.where) {
    for (const auto& row : u.rows) {
      Unit unit;
      unit.row = &row;
      if (eval_pred(ctx, unit, c.where->pred, false) == Tri::True)
        filtered.push_back(row);
    }
  } else {
    filtered = u.rows;
  }

  bool select_has_agg = false;
  for (const auto& item : c.select.items)
    if (item.agg) select_has_agg = true;
  bool order_has_agg = false;
  if (c.order_by)
    for (const auto& k : c.order_by->keys)
      if (std::holds_alternative<AggCall>(k.expr)) order_has_agg = true;

  if (order_has_agg && !c.group_by)
    throw ExecutionError(ExecutionError::Kind::AggregateOrderWithoutGroupBy,
                         "aggregate ordering requires GROUP BY");

  ctx.grouped = c.group_by.has_value() || select_has_agg || c.having.has_value();
  if (c.group_by)
    for (const auto& col : c.group_by->cols)
      ctx.group_cols.push_back(u.resolve(col));

  // Build output units.
  std::vector<Unit> units;
  if (ctx.grouped) {
    if (c.group_by) {
      std::map<std::vector<Value>, std::size_t,
               decltype([](const std::vector<Value>& a,
                           const std::vector<Value>& b) {
                 for (std::size_t i = 0; i < a.size(); ++i) {
                   int cmp = compare_values(a[i], b[i]);
                   if (cmp != 0) return cmp < 0;
                 }
                 return false;
               })>
          index;
      for (const auto& row : filtered) {
        std::vector<Value> key;
        key.reserve(ctx.group_cols.size());
        for (std::size_t idx : ctx.group_cols) key.push_back(row[idx]);
        auto [it, fresh] = index.emplace(std::move(key), units.size());
        if (fresh) units.push_back({});
        units[it->second].members.push_back(&row);
      }
    } else {
      // Implicit single group; bare columns are rejected during projection.
      Unit whole;
      for (const auto& row : filtered) whole.members.push_back(&row);
      units.push_back(std::move(whole));
    }
    if (c.having) {
      std::vector<Unit> kept;
      for (auto& unit : units)
        if (eval_pred(ctx, unit, c.having->pred, true) == Tri::True)
          kept.push_back(std::move(unit));
      units = std::move(kept);
    }
  } else {
    for (const auto& row : filtered) {
      Unit unit;
      unit.row = &row;
      units.push_back(unit);
    }
  }

  // Plan projection early so semantic errors beat ordering errors.
  std::vector<ProjectedItem> plan = plan_projection(c, ctx);

  if (c.order_by) {
    std::vector<SortKey> keys;
    for (const auto& k : c.order_by->keys) {
      SortKey sk;
      sk.ascending = k.ascending;
      if (const auto* call = std::get_if<AggCall>(&k.expr)) {
        sk.is_agg = true;
        sk.agg = ctx.make_spec(*call);
      } else {
        sk.is_agg = false;
        sk.col = u.resolve(std::get<ColumnRef>(k.expr));
      }
      keys.push_back(sk);
    }
    // Precompute key tuples; stable sort keeps tie groups in input order.
    std::vector<std::vector<Value>> key_rows(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
      bool empty_group = ctx.grouped && units[i].members.empty();
      for (const auto& k : keys)
        key_rows[i].push_back(empty_group ? Value::null()
                                          : key_value(ctx, units[i], k));
    }
    std::vector<std::size_t> order(units.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       for (std::size_t i = 0; i < keys.size(); ++i) {
                         int cmp = compare_values(key_rows[a][i], key_rows[b][i]);
                         if (cmp != 0)
                           return keys[i].ascending ? cmp < 0 : cmp > 0;
                       }
                       return false;
                     });
    std::vector<Unit> sorted;
    sorted.reserve(units.size());
    for (std::size_t i : order) sorted.push_back(std::move(units[i]));
    units = std::move(sorted);
  }

  if (c.limit && units.size() > static_cast<std::size_t>(c.limit->n))
    units.resize(static_cast<std::size_t>(c.limit->n));

  ResultTable result;
  result.ordered = c.order_by.has_value() || c.limit.has_value();
  for (const auto& item : plan) result.columns.push_back({item.label, item.type});

  for (const auto& unit : units) {
    bool empty_group = ctx.grouped && unit.members.empty();
    Row out;
    out.reserve(plan.size());
    for (const auto& item : plan) {
      if (item.is_agg) {
        out.push_back(fold_aggregate(item.agg, unit.members));
      } else if (empty_group) {
        out.push_back(Value::null());
      } else {
        out.push_back((*unit.representative())[item.col]);
      }
    }
    result.rows.push_back(std::move(out));
  }

  // Row-level DISTINCT: dedupe keeping first occurrence.
  if (c.select.distinct) {
    std::vector<Row> uniq;
    for (auto& row : result.rows) {
      bool seen = false;
      for (const auto& prev : uniq) {
        bool same = prev.size() == row.size();
        for (std::size_t i = 0; same && i < row.size(); ++i)
          same = prev[i] == row[i];
        if (same) {
          seen = true;
          break;
        }
      }
      if (!seen) uniq.push_back(std::move(row));
    }
    result.rows = std::move(uniq);
  }

  return result;
}

bool non_empty(const ClauseSet& c, const Database& db) {
  return !execute(c, db).rows.empty();
}

}  // namespace pmvis
