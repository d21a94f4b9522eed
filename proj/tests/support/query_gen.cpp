#include "support/query_gen.hpp"

#include <algorithm>

namespace pmvis::testing {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

bool chance(std::mt19937_64& rng, int percent) {
  return static_cast<int>(rng() % 100) < percent;
}

struct Bound {
  const Table* table;
  bool qualify;

  ColumnRef ref(const ColumnMeta& col) const {
    ColumnRef r;
    if (qualify) r.qualifier = Ident::of(table->name);
    r.column = Ident::of(col.name);
    return r;
  }
};

struct GenScope {
  std::vector<Bound> bounds;

  const Bound& any(std::mt19937_64& rng) const {
    return bounds[pick(rng, bounds.size())];
  }

  std::pair<const Bound*, const ColumnMeta*> any_column(
      std::mt19937_64& rng) const {
    const Bound& b = any(rng);
    return {&b, &b.table->columns[pick(rng, b.table->columns.size())]};
  }

  std::pair<const Bound*, const ColumnMeta*> any_numeric(
      std::mt19937_64& rng) const {
    std::vector<std::pair<const Bound*, const ColumnMeta*>> pool;
    for (const auto& b : bounds)
      for (const auto& col : b.table->columns)
        if (col.declared_type != ColumnType::Text) pool.emplace_back(&b, &col);
    if (pool.empty()) return any_column(rng);
    return pool[pick(rng, pool.size())];
  }
};

/// A literal sampled from live column data keeps predicates selective.
Value sample_literal(std::mt19937_64& rng, const Table& t, std::size_t col) {
  std::vector<const Value*> pool;
  for (const auto& row : t.rows)
    if (!row[col].is_null()) pool.push_back(&row[col]);
  if (pool.empty()) return Value(std::int64_t{0});
  return *pool[pick(rng, pool.size())];
}

PredPtr make_atom(std::mt19937_64& rng, const GenScope& scope) {
  const Bound& b = scope.any(rng);
  std::size_t col_index = pick(rng, b.table->columns.size());
  const ColumnMeta& col = b.table->columns[col_index];
  Operand lhs = b.ref(col);
  Value sampled = sample_literal(rng, *b.table, col_index);

  if (col.declared_type == ColumnType::Text) {
    if (sampled.is_null() || !sampled.is_text())
      return std::make_shared<Pred>(
          Pred{Comparison{lhs, CmpOp::Ne, Value(std::string("~"))}});
    switch (pick(rng, 3)) {
      case 0:
        return std::make_shared<Pred>(
            Pred{Comparison{lhs, chance(rng, 60) ? CmpOp::Eq : CmpOp::Ne, sampled}});
      case 1: {
        InList in;
        in.lhs = lhs;
        in.items.push_back(sampled);
        in.items.push_back(sample_literal(rng, *b.table, col_index));
        if (chance(rng, 40))
          in.items.push_back(sample_literal(rng, *b.table, col_index));
        in.negated = chance(rng, 20);
        return std::make_shared<Pred>(Pred{std::move(in)});
      }
      default: {
        LikePred like;
        like.lhs = lhs;
        const std::string& text = sampled.as_text();
        like.pattern = text.substr(0, std::min<std::size_t>(2, text.size())) + "%";
        like.negated = chance(rng, 20);
        return std::make_shared<Pred>(Pred{std::move(like)});
      }
    }
  }

  switch (pick(rng, 4)) {
    case 0:
    case 1: {
      static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt,
                                  CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
      return std::make_shared<Pred>(
          Pred{Comparison{lhs, ops[pick(rng, 6)], sampled}});
    }
    case 2: {
      BetweenPred between;
      between.lhs = lhs;
      Value other = sample_literal(rng, *b.table, col_index);
      if (compare_values(sampled, other) <= 0) {
        between.lo = sampled;
        between.hi = other;
      } else {
        between.lo = other;
        between.hi = sampled;
      }
      between.negated = chance(rng, 15);
      return std::make_shared<Pred>(Pred{std::move(between)});
    }
    default: {
      InList in;
      in.lhs = lhs;
      in.items.push_back(sampled);
      in.items.push_back(sample_literal(rng, *b.table, col_index));
      in.negated = chance(rng, 20);
      return std::make_shared<Pred>(Pred{std::move(in)});
    }
  }
}

PredPtr make_predicate(std::mt19937_64& rng, const GenScope& scope) {
  PredPtr p = make_atom(rng, scope);
  if (chance(rng, 35)) {
    PredPtr q = make_atom(rng, scope);
    if (chance(rng, 50))
      p = std::make_shared<Pred>(Pred{AndPred{p, q}});
    else
      p = std::make_shared<Pred>(Pred{OrPred{p, q}});
  }
  if (chance(rng, 10)) p = std::make_shared<Pred>(Pred{NotPred{p}});
  return p;
}

AggCall make_aggregate(std::mt19937_64& rng, const GenScope& scope) {
  AggCall call;
  if (chance(rng, 30)) {
    call.fn = AggFn::Count;
    call.star = true;
    return call;
  }
  switch (pick(rng, 5)) {
    case 0: call.fn = AggFn::Count; break;
    case 1: call.fn = AggFn::Sum; break;
    case 2: call.fn = AggFn::Avg; break;
    case 3: call.fn = AggFn::Min; break;
    default: call.fn = AggFn::Max; break;
  }
  auto [bound, col] =
      (call.fn == AggFn::Sum || call.fn == AggFn::Avg)
          ? scope.any_numeric(rng)
          : scope.any_column(rng);
  if (col->declared_type == ColumnType::Text &&
      (call.fn == AggFn::Sum || call.fn == AggFn::Avg))
    call.fn = AggFn::Count;  // no numeric column available
  call.col = bound->ref(*col);
  call.distinct = call.fn == AggFn::Count && chance(rng, 25);
  return call;
}

}  // namespace

ClauseSet random_query(const Database& db, std::mt19937_64& rng) {
  ClauseSet cs;

  const auto& tables = db.tables();
  std::size_t from_index = pick(rng, tables.size());
  cs.from.table.table = Ident::of(tables[from_index].name);

  GenScope scope;
  bool joined = false;
  if (tables.size() > 1 && chance(rng, 30)) {
    // Join on a same-typed column pair, preferring declared foreign keys.
    std::vector<ForeignKey> options;
    for (const auto& fk : db.foreign_keys()) {
      if (fk.from_table == tables[from_index].key())
        options.push_back(fk);
      else if (fk.to_table == tables[from_index].key())
        options.push_back({fk.to_table, fk.to_column, fk.from_table, fk.from_column});
    }
    if (!options.empty()) {
      const ForeignKey& fk = options[pick(rng, options.size())];
      JoinClause join;
      join.table.table = Ident::of(fk.to_table);
      join.left.qualifier = Ident::of(fk.from_table);
      join.left.column = Ident::of(fk.from_column);
      join.right.qualifier = Ident::of(fk.to_table);
      join.right.column = Ident::of(fk.to_column);
      cs.joins.push_back(join);
      joined = true;
    }
  }

  scope.bounds.push_back({&tables[from_index], joined});
  if (joined)
    scope.bounds.push_back({db.find_table(cs.joins[0].table.table.key), true});

  if (chance(rng, 55)) cs.where = WhereClause{make_predicate(rng, scope)};

  const bool grouped = chance(rng, 40);
  if (grouped) {
    GroupByClause group;
    std::vector<ColumnRef> group_refs;
    const Bound& b = scope.any(rng);
    std::size_t first = pick(rng, b.table->columns.size());
    group_refs.push_back(b.ref(b.table->columns[first]));
    if (chance(rng, 25)) {
      std::size_t second = pick(rng, b.table->columns.size());
      if (second != first) group_refs.push_back(b.ref(b.table->columns[second]));
    }
    group.cols = group_refs;
    cs.group_by = group;

    for (const auto& col : group_refs) {
      SelectItem item;
      item.col = col;
      cs.select.items.push_back(item);
    }
    SelectItem agg_item;
    agg_item.agg = make_aggregate(rng, scope);
    cs.select.items.push_back(agg_item);
    if (chance(rng, 25)) {
      SelectItem extra;
      extra.agg = make_aggregate(rng, scope);
      cs.select.items.push_back(extra);
    }

    if (chance(rng, 35)) {
      HavingClause having;
      AggCall call;
      call.fn = AggFn::Count;
      call.star = true;
      having.pred = std::make_shared<Pred>(Pred{Comparison{
          call, chance(rng, 70) ? CmpOp::Ge : CmpOp::Gt,
          Value(static_cast<std::int64_t>(1 + pick(rng, 2)))}});
      cs.having = having;
    }

    if (chance(rng, 55)) {
      OrderByClause order;
      OrderKey key;
      if (chance(rng, 50)) {
        key.expr = group_refs[pick(rng, group_refs.size())];
      } else {
        const SelectItem& agg = cs.select.items.back();
        key.expr = *agg.agg;
      }
      key.ascending = chance(rng, 60);
      order.keys.push_back(key);
      cs.order_by = order;
    }
  } else {
    std::size_t n_items = 1 + pick(rng, 3);
    std::set<std::string> taken;
    for (std::size_t i = 0; i < n_items; ++i) {
      auto [bound, col] = scope.any_column(rng);
      if (!taken.insert(bound->table->key() + "." + col->key()).second) continue;
      SelectItem item;
      item.col = bound->ref(*col);
      cs.select.items.push_back(item);
    }
    if (cs.select.items.empty()) {
      auto [bound, col] = scope.any_column(rng);
      SelectItem item;
      item.col = bound->ref(*col);
      cs.select.items.push_back(item);
    }
    cs.select.distinct = chance(rng, 15);

    if (chance(rng, 45)) {
      OrderByClause order;
      auto [bound, col] = scope.any_column(rng);
      OrderKey key;
      key.expr = bound->ref(*col);
      key.ascending = chance(rng, 60);
      order.keys.push_back(key);
      if (chance(rng, 20)) {
        auto [b2, c2] = scope.any_column(rng);
        OrderKey second;
        second.expr = b2->ref(*c2);
        second.ascending = chance(rng, 60);
        order.keys.push_back(second);
      }
      cs.order_by = order;
    }
  }

  if (chance(rng, 25))
    cs.limit = LimitClause{static_cast<std::int64_t>(1 + pick(rng, 8))};

  if (chance(rng, 30)) {
    VisualizeClause vis;
    switch (pick(rng, 4)) {
      case 0: vis.chart = ChartType::Bar; break;
      case 1: vis.chart = ChartType::Pie; break;
      case 2: vis.chart = ChartType::Line; break;
      default: vis.chart = ChartType::Scatter; break;
    }
    cs.visualize = vis;
  }

  return cs;
}

ClauseSet random_broken_query(const Database& db, std::mt19937_64& rng) {
  ClauseSet cs = random_query(db, rng);
  if (chance(rng, 50)) {
    // Unknown column in the first plain select item (or appended).
    SelectItem bogus;
    bogus.col.column = Ident::of("no_such_col_" + std::to_string(rng() % 1000));
    if (!cs.group_by)
      cs.select.items.push_back(bogus);
    else
      cs.group_by->cols.push_back(bogus.col);
  } else {
    cs.from.table.table = Ident::of("ghost_table_" + std::to_string(rng() % 1000));
    cs.from.table.alias.reset();
  }
  return cs;
}

}  // namespace pmvis::testing
