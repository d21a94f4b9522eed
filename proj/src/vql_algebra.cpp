#include <functional>
#include <map>

#include "pmvis/errors.hpp"
#include "pmvis/vql.hpp"

namespace pmvis {

namespace {

/// Binding name (alias or table) -> actual table key, in FROM/JOIN order.
std::map<std::string, std::string> bindings(const ClauseSet& c) {
  std::map<std::string, std::string> out;
  for (const auto& ref : c.table_refs())
    out[ref.binding().key] = ref.table.key;
  return out;
}

class ColumnCollector {
 public:
  ColumnCollector(const ClauseSet& c) : binds_(bindings(c)) {
    for (const auto& [name, table] : binds_) targets_.insert(table);
  }

  void add(const ColumnRef& col) {
    if (col.qualifier) {
      auto it = binds_.find(col.qualifier->key);
      const std::string& table =
          it != binds_.end() ? it->second : col.qualifier->key;
      out_.insert(table + "." + col.column.key);
      return;
    }
    // Unqualified: attribute to the single bound table. Several distinct
    // targets make the reference ambiguous without catalog knowledge.
    if (targets_.size() > 1) throw AmbiguousColumn(col.column.display);
    out_.insert(*targets_.begin() + "." + col.column.key);
  }

  std::set<std::string> take() { return std::move(out_); }

 private:
  std::map<std::string, std::string> binds_;
  std::set<std::string> targets_;
  std::set<std::string> out_;
};

}  // namespace

std::vector<ClauseRef> optional_clauses(const ClauseSet& c,
                                        const MaskPolicy& policy) {
  std::vector<ClauseRef> out;
  for (const auto& ref : c.all_clauses()) {
    if (ref.kind == ClauseKind::Select || ref.kind == ClauseKind::From)
      continue;
    if (ref.kind == ClauseKind::Visualize && !policy.maskable_visualize)
      continue;
    out.push_back(ref);
  }
  return out;
}

std::set<ClauseKind> prerequisites(const Clause& c) {
  switch (c.kind()) {
    case ClauseKind::Having:
      return {ClauseKind::GroupBy};
    case ClauseKind::OrderBy: {
      const auto& o = std::get<OrderByClause>(c.payload);
      for (const auto& k : o.keys)
        if (std::holds_alternative<AggCall>(k.expr))
          return {ClauseKind::GroupBy};
      return {};
    }
    default:
      return {};
  }
}

namespace {

template <typename Fn>
void visit_column_refs(const ClauseSet& c, Fn&& fn) {
  auto visit_operand = [&](const Operand& op) {
    if (const auto* cr = std::get_if<ColumnRef>(&op)) fn(*cr);
    if (const auto* a = std::get_if<AggCall>(&op))
      if (!a->star) fn(a->col);
  };
  std::function<void(const PredPtr&)> visit_pred = [&](const PredPtr& p) {
    if (!p) return;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Comparison>) {
            visit_operand(x.lhs);
            visit_operand(x.rhs);
          } else if constexpr (std::is_same_v<T, InList> ||
                               std::is_same_v<T, LikePred> ||
                               std::is_same_v<T, BetweenPred>) {
            visit_operand(x.lhs);
          } else if constexpr (std::is_same_v<T, AndPred> ||
                               std::is_same_v<T, OrPred>) {
            visit_pred(x.lhs);
            visit_pred(x.rhs);
          } else {
            visit_pred(x.inner);
          }
        },
        p->node);
  };

  for (const auto& item : c.select.items) {
    if (item.star) continue;  // expansion is the executor's business
    if (item.agg) {
      if (!item.agg->star) fn(item.agg->col);
    } else {
      fn(item.col);
    }
  }
  for (const auto& j : c.joins) {
    fn(j.left);
    fn(j.right);
  }
  if (c.where) visit_pred(c.where->pred);
  if (c.group_by)
    for (const auto& col : c.group_by->cols) fn(col);
  if (c.having) visit_pred(c.having->pred);
  if (c.order_by)
    for (const auto& k : c.order_by->keys) {
      if (const auto* cr = std::get_if<ColumnRef>(&k.expr)) fn(*cr);
      else if (!std::get<AggCall>(k.expr).star)
        fn(std::get<AggCall>(k.expr).col);
    }
  if (c.bin_by) fn(c.bin_by->col);
}

}  // namespace

std::set<std::string> referenced_columns(const ClauseSet& c) {
  ColumnCollector cols(c);
  visit_column_refs(c, [&](const ColumnRef& ref) { cols.add(ref); });
  return cols.take();
}

std::vector<ColumnRef> column_references(const ClauseSet& c) {
  std::vector<ColumnRef> out;
  visit_column_refs(c, [&](const ColumnRef& ref) { out.push_back(ref); });
  return out;
}

std::set<std::string> bound_columns(const ClauseSet& c, const Database& db) {
  std::set<std::string> out;
  for (const auto& ref : c.table_refs()) {
    const Table* t = db.find_table(ref.table.key);
    if (!t) throw UnknownTable(ref.table.display);
    for (const auto& col : t->columns) out.insert(t->key() + "." + col.key());
  }
  return out;
}

std::set<std::string> referenced_tables(const ClauseSet& c) {
  std::set<std::string> out;
  for (const auto& ref : c.table_refs()) out.insert(ref.table.key);
  return out;
}

VqlComponents components(const ClauseSet& c) {
  VqlComponents parts;
  if (c.visualize) parts.vis = c.visualize->chart;
  parts.axis = c.select.items;
  parts.axis_distinct = c.select.distinct;
  parts.data = DataClauses{c.from,     c.joins,    c.where, c.group_by,
                           c.having,   c.order_by, c.limit, c.bin_by};
  return parts;
}

ClauseSet recombine(const VqlComponents& parts) {
  ClauseSet c;
  if (parts.vis) c.visualize = VisualizeClause{*parts.vis};
  c.select.items = parts.axis;
  c.select.distinct = parts.axis_distinct;
  c.from = parts.data.from;
  c.joins = parts.data.joins;
  c.where = parts.data.where;
  c.group_by = parts.data.group_by;
  c.having = parts.data.having;
  c.order_by = parts.data.order_by;
  c.limit = parts.data.limit;
  c.bin_by = parts.data.bin_by;
  return c;
}

}  // namespace pmvis
