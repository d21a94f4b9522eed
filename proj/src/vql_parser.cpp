#include <cctype>
#include <unordered_set>

#include "pmvis/errors.hpp"
#include "pmvis/text_util.hpp"
#include "pmvis/vql.hpp"

namespace pmvis {

Ident Ident::of(std::string text) {
  Ident id;
  id.key = ascii_lower(text);
  id.display = std::move(text);
  return id;
}

namespace {

enum class Tok {
  Word,     // identifier or keyword
  Number,   // integer or real literal
  String,   // '...'
  Comma,
  Dot,
  LParen,
  RParen,
  Star,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  End,
};

struct Token {
  Tok type = Tok::End;
  std::string text;    // raw word / string contents
  Value number;        // Number only
  std::size_t pos = 0;
};

const std::unordered_set<std::string>& reserved_words() {
  static const std::unordered_set<std::string> words = {
      "visualize", "select", "from",   "join",  "on",      "where",
      "group",     "by",     "having", "order", "limit",   "bin",
      "and",       "or",     "not",    "in",    "like",    "between",
      "as",        "asc",    "desc",   "distinct", "count", "sum",
      "avg",       "min",    "max"};
  return words;
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                       text[i] == '_'))
        ++i;
      t.type = Tok::Word;
      t.text = text.substr(start, i - start);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               ((c == '-' || c == '+') && i + 1 < n &&
                std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t start = i;
      if (c == '-' || c == '+') ++i;
      bool real = false;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i < n && text[i] == '.' && i + 1 < n &&
          std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        real = true;
        ++i;
        while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      }
      if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (text[j] == '-' || text[j] == '+')) ++j;
        if (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) {
          real = true;
          i = j;
          while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
      }
      std::string lit = text.substr(start, i - start);
      t.type = Tok::Number;
      t.text = lit;
      try {
        t.number = real ? Value(std::stod(lit))
                        : Value(static_cast<std::int64_t>(std::stoll(lit)));
      } catch (const std::out_of_range&) {
        throw SyntaxError(start, "numeric literal out of range: " + lit);
      }
    } else if (c == '\'') {
      ++i;
      std::string s;
      bool closed = false;
      while (i < n) {
        if (text[i] == '\'') {
          if (i + 1 < n && text[i + 1] == '\'') {
            s += '\'';
            i += 2;
          } else {
            ++i;
            closed = true;
            break;
          }
        } else {
          s += text[i++];
        }
      }
      if (!closed) throw SyntaxError(t.pos, "unterminated string literal");
      t.type = Tok::String;
      t.text = std::move(s);
    } else {
      switch (c) {
        case ',': t.type = Tok::Comma; ++i; break;
        case '.': t.type = Tok::Dot; ++i; break;
        case '(': t.type = Tok::LParen; ++i; break;
        case ')': t.type = Tok::RParen; ++i; break;
        case '*': t.type = Tok::Star; ++i; break;
        case '=': t.type = Tok::Eq; ++i; break;
        case '!':
          if (i + 1 < n && text[i + 1] == '=') {
            t.type = Tok::Ne;
            i += 2;
          } else {
            throw SyntaxError(i, "stray '!'");
          }
          break;
        case '<':
          if (i + 1 < n && text[i + 1] == '=') {
            t.type = Tok::Le;
            i += 2;
          } else if (i + 1 < n && text[i + 1] == '>') {
            t.type = Tok::Ne;
            i += 2;
          } else {
            t.type = Tok::Lt;
            ++i;
          }
          break;
        case '>':
          if (i + 1 < n && text[i + 1] == '=') {
            t.type = Tok::Ge;
            i += 2;
          } else {
            t.type = Tok::Gt;
            ++i;
          }
          break;
        default:
          throw SyntaxError(i, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.type = Tok::End;
  end.pos = n;
  out.push_back(end);
  return out;
}

constexpr int kMaxPredicateDepth = 128;

struct Parser {
  const std::vector<Token> toks;
  std::size_t i = 0;
  int depth = 0;  // predicate nesting guard

  explicit Parser(std::vector<Token> t) : toks(std::move(t)) {}

  const Token& peek() const { return toks[i]; }
  const Token& next() { return toks[i++]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string got = t.type == Tok::End ? "end of input" : "'" + describe(t) + "'";
    throw SyntaxError(t.pos, "expected " + expected + ", got " + got);
  }

  static std::string describe(const Token& t) {
    switch (t.type) {
      case Tok::Word: return t.text;
      case Tok::Number: return t.text;
      case Tok::String: return "'" + t.text + "'";
      case Tok::Comma: return ",";
      case Tok::Dot: return ".";
      case Tok::LParen: return "(";
      case Tok::RParen: return ")";
      case Tok::Star: return "*";
      case Tok::Eq: return "=";
      case Tok::Ne: return "!=";
      case Tok::Lt: return "<";
      case Tok::Le: return "<=";
      case Tok::Gt: return ">";
      case Tok::Ge: return ">=";
      case Tok::End: return "<end>";
    }
    return "?";
  }

  bool at_keyword(const char* kw) const {
    return peek().type == Tok::Word && ascii_lower(peek().text) == kw;
  }

  bool accept_keyword(const char* kw) {
    if (!at_keyword(kw)) return false;
    ++i;
    return true;
  }

  void expect_keyword(const char* kw) {
    if (!accept_keyword(kw)) fail(std::string(kw));
  }

  bool accept(Tok type) {
    if (peek().type != type) return false;
    ++i;
    return true;
  }

  void expect(Tok type, const char* what) {
    if (!accept(type)) fail(what);
  }

  Ident identifier(const char* what) {
    if (peek().type != Tok::Word) fail(what);
    if (reserved_words().count(ascii_lower(peek().text))) fail(what);
    return Ident::of(next().text);
  }

  ColumnRef column_ref() {
    Ident first = identifier("column name");
    ColumnRef ref;
    if (accept(Tok::Dot)) {
      ref.qualifier = first;
      ref.column = identifier("column name after '.'");
    } else {
      ref.column = first;
    }
    return ref;
  }

  std::optional<AggFn> at_aggregate() const {
    if (peek().type != Tok::Word) return std::nullopt;
    std::string w = ascii_lower(peek().text);
    if (w == "count") return AggFn::Count;
    if (w == "sum") return AggFn::Sum;
    if (w == "avg") return AggFn::Avg;
    if (w == "min") return AggFn::Min;
    if (w == "max") return AggFn::Max;
    return std::nullopt;
  }

  AggCall aggregate_call() {
    AggCall call;
    call.fn = *at_aggregate();
    ++i;
    expect(Tok::LParen, "'(' after aggregate");
    if (accept(Tok::Star)) {
      if (call.fn != AggFn::Count) fail("column inside aggregate");
      call.star = true;
    } else {
      call.distinct = accept_keyword("distinct");
      call.col = column_ref();
    }
    expect(Tok::RParen, "')'");
    return call;
  }

  SelectItem select_item() {
    SelectItem item;
    if (accept(Tok::Star)) {
      item.star = true;
      return item;
    }
    if (at_aggregate()) {
      item.agg = aggregate_call();
      return item;
    }
    item.col = column_ref();
    return item;
  }

  TableRef table_ref() {
    TableRef ref;
    ref.table = identifier("table name");
    if (accept_keyword("as")) {
      ref.alias = identifier("alias");
    } else if (peek().type == Tok::Word &&
               !reserved_words().count(ascii_lower(peek().text))) {
      ref.alias = identifier("alias");
    }
    return ref;
  }

  Value literal() {
    if (peek().type == Tok::Number) return next().number;
    if (peek().type == Tok::String) return Value(next().text);
    fail("literal");
  }

  Operand operand(bool allow_aggregate) {
    if (peek().type == Tok::Number || peek().type == Tok::String)
      return literal();
    if (allow_aggregate && at_aggregate()) return aggregate_call();
    if (peek().type == Tok::Word &&
        !reserved_words().count(ascii_lower(peek().text)))
      return column_ref();
    fail(allow_aggregate ? "column, literal or aggregate" : "column or literal");
  }

  CmpOp cmp_op() {
    switch (peek().type) {
      case Tok::Eq: ++i; return CmpOp::Eq;
      case Tok::Ne: ++i; return CmpOp::Ne;
      case Tok::Lt: ++i; return CmpOp::Lt;
      case Tok::Le: ++i; return CmpOp::Le;
      case Tok::Gt: ++i; return CmpOp::Gt;
      case Tok::Ge: ++i; return CmpOp::Ge;
      default: fail("comparison operator");
    }
  }

  PredPtr predicate(bool allow_aggregate) { return or_expr(allow_aggregate); }

  PredPtr or_expr(bool agg) {
    PredPtr lhs = and_expr(agg);
    while (accept_keyword("or")) {
      PredPtr rhs = and_expr(agg);
      lhs = std::make_shared<Pred>(Pred{OrPred{lhs, rhs}});
    }
    return lhs;
  }

  PredPtr and_expr(bool agg) {
    PredPtr lhs = unary_pred(agg);
    while (accept_keyword("and")) {
      PredPtr rhs = unary_pred(agg);
      lhs = std::make_shared<Pred>(Pred{AndPred{lhs, rhs}});
    }
    return lhs;
  }

  PredPtr unary_pred(bool agg) {
    if (++depth > kMaxPredicateDepth)
      throw SyntaxError(peek().pos, "predicate nested too deeply");
    PredPtr out;
    if (accept_keyword("not")) {
      PredPtr inner = unary_pred(agg);
      out = std::make_shared<Pred>(Pred{NotPred{inner}});
    } else if (accept(Tok::LParen)) {
      out = or_expr(agg);
      expect(Tok::RParen, "')'");
    } else {
      out = comparison(agg);
    }
    --depth;
    return out;
  }

  PredPtr comparison(bool agg) {
    Operand lhs = operand(agg);
    bool negated = accept_keyword("not");
    if (accept_keyword("in")) {
      InList node;
      node.lhs = std::move(lhs);
      node.negated = negated;
      expect(Tok::LParen, "'(' after IN");
      node.items.push_back(literal());
      while (accept(Tok::Comma)) node.items.push_back(literal());
      expect(Tok::RParen, "')'");
      return std::make_shared<Pred>(Pred{std::move(node)});
    }
    if (accept_keyword("like")) {
      if (peek().type != Tok::String) fail("string pattern after LIKE");
      LikePred node;
      node.lhs = std::move(lhs);
      node.negated = negated;
      node.pattern = next().text;
      return std::make_shared<Pred>(Pred{std::move(node)});
    }
    if (accept_keyword("between")) {
      BetweenPred node;
      node.lhs = std::move(lhs);
      node.negated = negated;
      node.lo = literal();
      expect_keyword("and");
      node.hi = literal();
      return std::make_shared<Pred>(Pred{std::move(node)});
    }
    if (negated) fail("IN, LIKE or BETWEEN after NOT");
    Comparison node;
    node.lhs = std::move(lhs);
    node.op = cmp_op();
    node.rhs = operand(agg);
    return std::make_shared<Pred>(Pred{std::move(node)});
  }

  OrderKey order_key() {
    OrderKey key;
    if (at_aggregate())
      key.expr = aggregate_call();
    else
      key.expr = column_ref();
    if (accept_keyword("desc"))
      key.ascending = false;
    else
      accept_keyword("asc");  // ASC is the default
    return key;
  }
};

}  // namespace

ClauseSet parse(const std::string& text) {
  if (text.empty()) throw SyntaxError(0, "empty input");
  Parser p(tokenize(text));
  ClauseSet cs;

  if (p.accept_keyword("visualize")) {
    if (p.peek().type != Tok::Word) p.fail("chart type (BAR, PIE, LINE, SCATTER)");
    std::string chart = ascii_lower(p.next().text);
    VisualizeClause vis;
    if (chart == "bar") vis.chart = ChartType::Bar;
    else if (chart == "pie") vis.chart = ChartType::Pie;
    else if (chart == "line") vis.chart = ChartType::Line;
    else if (chart == "scatter") vis.chart = ChartType::Scatter;
    else {
      --p.i;
      p.fail("chart type (BAR, PIE, LINE, SCATTER)");
    }
    cs.visualize = vis;
  }

  p.expect_keyword("select");
  cs.select.distinct = p.accept_keyword("distinct");
  cs.select.items.push_back(p.select_item());
  while (p.accept(Tok::Comma)) cs.select.items.push_back(p.select_item());

  p.expect_keyword("from");
  cs.from.table = p.table_ref();

  while (p.accept_keyword("join")) {
    JoinClause join;
    join.table = p.table_ref();
    p.expect_keyword("on");
    join.left = p.column_ref();
    p.expect(Tok::Eq, "'=' in join condition");
    join.right = p.column_ref();
    cs.joins.push_back(std::move(join));
  }

  if (p.accept_keyword("where"))
    cs.where = WhereClause{p.predicate(/*allow_aggregate=*/false)};

  if (p.accept_keyword("group")) {
    p.expect_keyword("by");
    GroupByClause g;
    g.cols.push_back(p.column_ref());
    while (p.accept(Tok::Comma)) g.cols.push_back(p.column_ref());
    cs.group_by = std::move(g);
  }

  if (p.at_keyword("having")) {
    if (!cs.group_by) p.fail("GROUP BY before HAVING");
    p.expect_keyword("having");
    cs.having = HavingClause{p.predicate(/*allow_aggregate=*/true)};
  }

  if (p.accept_keyword("order")) {
    p.expect_keyword("by");
    OrderByClause o;
    o.keys.push_back(p.order_key());
    while (p.accept(Tok::Comma)) o.keys.push_back(p.order_key());
    cs.order_by = std::move(o);
  }

  if (p.accept_keyword("limit")) {
    if (p.peek().type != Tok::Number || !p.peek().number.is_integer() ||
        p.peek().number.as_integer() < 0)
      p.fail("non-negative integer after LIMIT");
    cs.limit = LimitClause{p.next().number.as_integer()};
  }

  if (p.accept_keyword("bin")) {
    BinByClause b;
    b.col = p.column_ref();
    p.expect_keyword("by");
    if (p.peek().type != Tok::Word) p.fail("bin interval (YEAR, MONTH, DAY, WEEKDAY)");
    std::string iv = ascii_lower(p.next().text);
    if (iv == "year") b.interval = BinInterval::Year;
    else if (iv == "month") b.interval = BinInterval::Month;
    else if (iv == "day") b.interval = BinInterval::Day;
    else if (iv == "weekday") b.interval = BinInterval::Weekday;
    else {
      --p.i;
      p.fail("bin interval (YEAR, MONTH, DAY, WEEKDAY)");
    }
    cs.bin_by = std::move(b);
  }

  if (p.peek().type != Tok::End) p.fail("end of query");
  return cs;
}

}  // namespace pmvis
