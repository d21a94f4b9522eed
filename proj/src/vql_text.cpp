#include <functional>
#include <map>

#include "pmvis/errors.hpp"
#include "pmvis/vql.hpp"

namespace pmvis {

std::string to_keyword(ChartType t) {
  switch (t) {
    case ChartType::Bar: return "BAR";
    case ChartType::Pie: return "PIE";
    case ChartType::Line: return "LINE";
    case ChartType::Scatter: return "SCATTER";
  }
  return "?";
}

std::string to_keyword(ClauseKind k) {
  switch (k) {
    case ClauseKind::Visualize: return "VISUALIZE";
    case ClauseKind::Select: return "SELECT";
    case ClauseKind::From: return "FROM";
    case ClauseKind::Join: return "JOIN";
    case ClauseKind::Where: return "WHERE";
    case ClauseKind::GroupBy: return "GROUP BY";
    case ClauseKind::Having: return "HAVING";
    case ClauseKind::OrderBy: return "ORDER BY";
    case ClauseKind::Limit: return "LIMIT";
    case ClauseKind::BinBy: return "BIN BY";
  }
  return "?";
}

std::string to_keyword(AggFn f) {
  switch (f) {
    case AggFn::Count: return "COUNT";
    case AggFn::Sum: return "SUM";
    case AggFn::Avg: return "AVG";
    case AggFn::Min: return "MIN";
    case AggFn::Max: return "MAX";
  }
  return "?";
}

std::string to_keyword(BinInterval b) {
  switch (b) {
    case BinInterval::Year: return "YEAR";
    case BinInterval::Month: return "MONTH";
    case BinInterval::Day: return "DAY";
    case BinInterval::Weekday: return "WEEKDAY";
  }
  return "?";
}

ClauseKind Clause::kind() const {
  return std::visit(
      [](const auto& c) -> ClauseKind {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, VisualizeClause>) return ClauseKind::Visualize;
        else if constexpr (std::is_same_v<T, SelectClause>) return ClauseKind::Select;
        else if constexpr (std::is_same_v<T, FromClause>) return ClauseKind::From;
        else if constexpr (std::is_same_v<T, JoinClause>) return ClauseKind::Join;
        else if constexpr (std::is_same_v<T, WhereClause>) return ClauseKind::Where;
        else if constexpr (std::is_same_v<T, GroupByClause>) return ClauseKind::GroupBy;
        else if constexpr (std::is_same_v<T, HavingClause>) return ClauseKind::Having;
        else if constexpr (std::is_same_v<T, OrderByClause>) return ClauseKind::OrderBy;
        else if constexpr (std::is_same_v<T, LimitClause>) return ClauseKind::Limit;
        else return ClauseKind::BinBy;
      },
      payload);
}

bool operand_equal(const Operand& a, const Operand& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        return x == std::get<T>(b);
      },
      a);
}

bool pred_equal(const PredPtr& a, const PredPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->node.index() != b->node.index()) return false;
  const Pred& pb = *b;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(pb.node);
        if constexpr (std::is_same_v<T, Comparison>) {
          return x.op == y.op && operand_equal(x.lhs, y.lhs) &&
                 operand_equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, InList>) {
          return x.negated == y.negated && operand_equal(x.lhs, y.lhs) &&
                 x.items == y.items;
        } else if constexpr (std::is_same_v<T, LikePred>) {
          return x.negated == y.negated && x.pattern == y.pattern &&
                 operand_equal(x.lhs, y.lhs);
        } else if constexpr (std::is_same_v<T, BetweenPred>) {
          return x.negated == y.negated && operand_equal(x.lhs, y.lhs) &&
                 x.lo == y.lo && x.hi == y.hi;
        } else if constexpr (std::is_same_v<T, AndPred>) {
          return pred_equal(x.lhs, y.lhs) && pred_equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, OrPred>) {
          return pred_equal(x.lhs, y.lhs) && pred_equal(x.rhs, y.rhs);
        } else {
          return pred_equal(x.inner, y.inner);
        }
      },
      a->node);
}

std::vector<ClauseRef> ClauseSet::all_clauses() const {
  std::vector<ClauseRef> out;
  if (visualize) out.push_back({ClauseKind::Visualize});
  out.push_back({ClauseKind::Select});
  out.push_back({ClauseKind::From});
  for (std::size_t j = 0; j < joins.size(); ++j)
    out.push_back({ClauseKind::Join, j});
  if (where) out.push_back({ClauseKind::Where});
  if (group_by) out.push_back({ClauseKind::GroupBy});
  if (having) out.push_back({ClauseKind::Having});
  if (order_by) out.push_back({ClauseKind::OrderBy});
  if (limit) out.push_back({ClauseKind::Limit});
  if (bin_by) out.push_back({ClauseKind::BinBy});
  return out;
}

bool ClauseSet::contains(const ClauseRef& ref) const {
  switch (ref.kind) {
    case ClauseKind::Visualize: return visualize.has_value();
    case ClauseKind::Select: return true;
    case ClauseKind::From: return true;
    case ClauseKind::Join: return ref.join_index < joins.size();
    case ClauseKind::Where: return where.has_value();
    case ClauseKind::GroupBy: return group_by.has_value();
    case ClauseKind::Having: return having.has_value();
    case ClauseKind::OrderBy: return order_by.has_value();
    case ClauseKind::Limit: return limit.has_value();
    case ClauseKind::BinBy: return bin_by.has_value();
  }
  return false;
}

Clause ClauseSet::get(const ClauseRef& ref) const {
  if (!contains(ref)) throw Error("clause not present: " + to_keyword(ref.kind));
  switch (ref.kind) {
    case ClauseKind::Visualize: return {*visualize};
    case ClauseKind::Select: return {select};
    case ClauseKind::From: return {from};
    case ClauseKind::Join: return {joins[ref.join_index]};
    case ClauseKind::Where: return {*where};
    case ClauseKind::GroupBy: return {*group_by};
    case ClauseKind::Having: return {*having};
    case ClauseKind::OrderBy: return {*order_by};
    case ClauseKind::Limit: return {*limit};
    case ClauseKind::BinBy: return {*bin_by};
  }
  throw Error("bad clause ref");
}

ClauseSet ClauseSet::without(const ClauseRef& ref) const {
  if (ref.kind == ClauseKind::Select || ref.kind == ClauseKind::From)
    throw Error("core clause cannot be removed: " + to_keyword(ref.kind));
  ClauseSet out = *this;
  switch (ref.kind) {
    case ClauseKind::Visualize: out.visualize.reset(); break;
    case ClauseKind::Join:
      if (ref.join_index >= joins.size()) throw Error("join index out of range");
      out.joins.erase(out.joins.begin() + static_cast<long>(ref.join_index));
      break;
    case ClauseKind::Where: out.where.reset(); break;
    case ClauseKind::GroupBy: out.group_by.reset(); break;
    case ClauseKind::Having: out.having.reset(); break;
    case ClauseKind::OrderBy: out.order_by.reset(); break;
    case ClauseKind::Limit: out.limit.reset(); break;
    case ClauseKind::BinBy: out.bin_by.reset(); break;
    default: break;
  }
  return out;
}

std::vector<TableRef> ClauseSet::table_refs() const {
  std::vector<TableRef> out;
  out.push_back(from.table);
  for (const auto& j : joins) out.push_back(j.table);
  return out;
}

namespace {

/// Chooses one display casing per identifier key: first occurrence in
/// canonical clause order wins.
class DisplayMap {
 public:
  void note(const Ident& id) { map_.try_emplace(id.key, id.display); }
  void note(const ColumnRef& c) {
    if (c.qualifier) note(*c.qualifier);
    note(c.column);
  }
  void note(const Operand& op) {
    if (const auto* c = std::get_if<ColumnRef>(&op)) note(*c);
    if (const auto* a = std::get_if<AggCall>(&op)) {
      if (!a->star) note(a->col);
    }
  }
  void note_pred(const PredPtr& p) {
    if (!p) return;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Comparison>) {
            note(x.lhs);
            note(x.rhs);
          } else if constexpr (std::is_same_v<T, InList> ||
                               std::is_same_v<T, LikePred> ||
                               std::is_same_v<T, BetweenPred>) {
            note(x.lhs);
          } else if constexpr (std::is_same_v<T, AndPred> ||
                               std::is_same_v<T, OrPred>) {
            note_pred(x.lhs);
            note_pred(x.rhs);
          } else {
            note_pred(x.inner);
          }
        },
        p->node);
  }

  std::string display(const Ident& id) const {
    auto it = map_.find(id.key);
    return it == map_.end() ? id.display : it->second;
  }

 private:
  std::map<std::string, std::string> map_;
};

std::string literal_text(const Value& v) {
  if (v.is_text()) {
    std::string out = "'";
    for (char c : v.as_text()) {
      out += c;
      if (c == '\'') out += '\'';
    }
    out += '\'';
    return out;
  }
  return v.to_display();
}

struct Renderer {
  const DisplayMap& names;

  std::string ident(const Ident& id) const { return names.display(id); }

  std::string column(const ColumnRef& c) const {
    std::string out;
    if (c.qualifier) out = ident(*c.qualifier) + ".";
    out += ident(c.column);
    return out;
  }

  std::string agg(const AggCall& a) const {
    std::string out = to_keyword(a.fn) + "(";
    if (a.star) out += "*";
    else {
      if (a.distinct) out += "DISTINCT ";
      out += column(a.col);
    }
    out += ")";
    return out;
  }

  std::string operand(const Operand& op) const {
    if (const auto* c = std::get_if<ColumnRef>(&op)) return column(*c);
    if (const auto* v = std::get_if<Value>(&op)) return literal_text(*v);
    return agg(std::get<AggCall>(op));
  }

  std::string cmp(CmpOp op) const {
    switch (op) {
      case CmpOp::Eq: return "=";
      case CmpOp::Ne: return "!=";
      case CmpOp::Lt: return "<";
      case CmpOp::Le: return "<=";
      case CmpOp::Gt: return ">";
      case CmpOp::Ge: return ">=";
    }
    return "?";
  }

  // Precedence: OR(1) < AND(2) < NOT(3) < atoms. Parentheses appear only
  // where a child binds looser than its context.
  std::string pred(const PredPtr& p, int context) const {
    return std::visit(
        [&](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Comparison>) {
            return operand(x.lhs) + " " + cmp(x.op) + " " + operand(x.rhs);
          } else if constexpr (std::is_same_v<T, InList>) {
            std::string out = operand(x.lhs);
            if (x.negated) out += " NOT";
            out += " IN (";
            for (std::size_t i = 0; i < x.items.size(); ++i) {
              if (i) out += ", ";
              out += literal_text(x.items[i]);
            }
            out += ")";
            return out;
          } else if constexpr (std::is_same_v<T, LikePred>) {
            return operand(x.lhs) + (x.negated ? " NOT LIKE " : " LIKE ") +
                   literal_text(Value(x.pattern));
          } else if constexpr (std::is_same_v<T, BetweenPred>) {
            return operand(x.lhs) + (x.negated ? " NOT BETWEEN " : " BETWEEN ") +
                   literal_text(x.lo) + " AND " + literal_text(x.hi);
          } else if constexpr (std::is_same_v<T, AndPred>) {
            std::string out = pred(x.lhs, 2) + " AND " + pred(x.rhs, 2);
            return context > 2 ? "(" + out + ")" : out;
          } else if constexpr (std::is_same_v<T, OrPred>) {
            std::string out = pred(x.lhs, 1) + " OR " + pred(x.rhs, 1);
            return context > 1 ? "(" + out + ")" : out;
          } else {
            return "NOT " + pred(x.inner, 3);
          }
        },
        p->node);
  }

  std::string table(const TableRef& t) const {
    std::string out = ident(t.table);
    if (t.alias) out += " AS " + ident(*t.alias);
    return out;
  }

  std::string select_body(const SelectClause& s) const {
    std::string out;
    if (s.distinct) out += "DISTINCT ";
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      if (i) out += ", ";
      const SelectItem& item = s.items[i];
      if (item.star) out += "*";
      else if (item.agg) out += agg(*item.agg);
      else out += column(item.col);
    }
    return out;
  }

  std::string clause_body(const Clause& c) const {
    return std::visit(
        [&](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, VisualizeClause>) {
            return to_keyword(x.chart);
          } else if constexpr (std::is_same_v<T, SelectClause>) {
            return select_body(x);
          } else if constexpr (std::is_same_v<T, FromClause>) {
            return table(x.table);
          } else if constexpr (std::is_same_v<T, JoinClause>) {
            return table(x.table) + " ON " + column(x.left) + " = " +
                   column(x.right);
          } else if constexpr (std::is_same_v<T, WhereClause>) {
            return pred(x.pred, 0);
          } else if constexpr (std::is_same_v<T, GroupByClause>) {
            std::string out;
            for (std::size_t i = 0; i < x.cols.size(); ++i) {
              if (i) out += ", ";
              out += column(x.cols[i]);
            }
            return out;
          } else if constexpr (std::is_same_v<T, HavingClause>) {
            return pred(x.pred, 0);
          } else if constexpr (std::is_same_v<T, OrderByClause>) {
            std::string out;
            for (std::size_t i = 0; i < x.keys.size(); ++i) {
              if (i) out += ", ";
              const OrderKey& k = x.keys[i];
              if (const auto* cr = std::get_if<ColumnRef>(&k.expr))
                out += column(*cr);
              else
                out += agg(std::get<AggCall>(k.expr));
              out += k.ascending ? " ASC" : " DESC";
            }
            return out;
          } else if constexpr (std::is_same_v<T, LimitClause>) {
            return std::to_string(x.n);
          } else {
            return column(x.col) + " BY " + to_keyword(x.interval);
          }
        },
        c.payload);
  }

  // BIN BY renders as "BIN <col> BY <interval>".
  std::string clause_full(const Clause& c) const {
    if (c.kind() == ClauseKind::BinBy) {
      const auto& b = std::get<BinByClause>(c.payload);
      return "BIN " + column(b.col) + " BY " + to_keyword(b.interval);
    }
    return to_keyword(c.kind()) + " " + clause_body(c);
  }
};

DisplayMap collect_names(const ClauseSet& c) {
  DisplayMap names;
  for (const auto& item : c.select.items) {
    if (item.star) continue;
    if (item.agg) {
      if (!item.agg->star) names.note(item.agg->col);
    } else {
      names.note(item.col);
    }
  }
  names.note(c.from.table.table);
  if (c.from.table.alias) names.note(*c.from.table.alias);
  for (const auto& j : c.joins) {
    names.note(j.table.table);
    if (j.table.alias) names.note(*j.table.alias);
    names.note(j.left);
    names.note(j.right);
  }
  if (c.where) names.note_pred(c.where->pred);
  if (c.group_by)
    for (const auto& col : c.group_by->cols) names.note(col);
  if (c.having) names.note_pred(c.having->pred);
  if (c.order_by)
    for (const auto& k : c.order_by->keys) {
      if (const auto* cr = std::get_if<ColumnRef>(&k.expr)) names.note(*cr);
      else if (!std::get<AggCall>(k.expr).star)
        names.note(std::get<AggCall>(k.expr).col);
    }
  if (c.bin_by) names.note(c.bin_by->col);
  return names;
}

}  // namespace

std::string assemble(const ClauseSet& c) {
  DisplayMap names = collect_names(c);
  Renderer r{names};
  std::string out;
  auto add = [&](const std::string& part) {
    if (!out.empty()) out += " ";
    out += part;
  };
  for (const auto& ref : c.all_clauses()) add(r.clause_full(c.get(ref)));
  return out;
}

std::string clause_text(const Clause& c) {
  DisplayMap names;  // no cross-clause unification for a lone clause
  Renderer r{names};
  return r.clause_full(c);
}

std::string select_item_text(const SelectItem& item) {
  DisplayMap names;
  Renderer r{names};
  if (item.star) return "*";
  if (item.agg) return r.agg(*item.agg);
  return r.column(item.col);
}

}  // namespace pmvis
