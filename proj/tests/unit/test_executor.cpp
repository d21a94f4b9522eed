#include <random>

#include "doctest.h"
#include "pmvis/errors.hpp"
#include "pmvis/executor.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/query_gen.hpp"

using namespace pmvis;
using namespace pmvis::testing;

namespace {

std::vector<std::string> text_column(const ResultTable& r, std::size_t col) {
  std::vector<std::string> out;
  for (const auto& row : r.rows) out.push_back(row[col].to_display());
  return out;
}

}  // namespace

TEST_CASE("case study target sorts ascending by floors") {
  Database db = load_fixture_db("building");
  ResultTable r = execute(parse(golden_building_vql()), db);
  REQUIRE(r.rows.size() == 5);
  CHECK(r.ordered);
  // brute-force oracle on the 5-row fixture, materialized by hand
  CHECK(text_column(r, 0) ==
        std::vector<std::string>{"800 Pine Road", "120 Main Street",
                                 "9 Hill Court", "25 Oak Avenue",
                                 "77 Lake Drive"});
  CHECK(text_column(r, 1) == std::vector<std::string>{"3", "4", "8", "12", "21"});
  CHECK(r.columns[0].label == "Street_address");
  CHECK(r.columns[1].label == "Floors");
  CHECK(r.columns[1].type == ColumnType::Integer);
}

TEST_CASE("count over an empty table yields one row") {
  Database db = empty_table_db();
  ResultTable r = execute(parse("SELECT COUNT(*) FROM t"), db);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0][0].as_integer() == 0);
  CHECK(!r.ordered);
}

TEST_CASE("empty-group aggregates: COUNT 0, SUM and AVG Null") {
  Database db = empty_table_db();
  ResultTable r =
      execute(parse("SELECT COUNT(a) , SUM(a) , AVG(a) , MIN(a) FROM t"), db);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0][0].as_integer() == 0);
  CHECK(r.rows[0][1].is_null());
  CHECK(r.rows[0][2].is_null());
  CHECK(r.rows[0][3].is_null());
}

TEST_CASE("grouped count per distinct address is 1") {
  Database db = load_fixture_db("building");
  ResultTable r = execute(
      parse("SELECT Street_address, COUNT(Floors) FROM building GROUP BY "
            "Street_address ORDER BY COUNT(Floors) ASC"),
      db);
  REQUIRE(r.rows.size() == 5);
  for (const auto& row : r.rows) CHECK(row[1].as_integer() == 1);
  // all tie on the key, so group first-occurrence order survives
  CHECK(text_column(r, 0) ==
        std::vector<std::string>{"120 Main Street", "25 Oak Avenue",
                                 "800 Pine Road", "77 Lake Drive",
                                 "9 Hill Court"});
}

TEST_CASE("schema breaches raise ContractViolation, never a silent result") {
  Database db = load_fixture_db("building");
  CHECK_THROWS_AS(execute(parse("SELECT ghost FROM building"), db),
                  ContractViolation);
  CHECK_THROWS_AS(execute(parse("SELECT a FROM ghost_table"), db),
                  ContractViolation);
  Database concerts = load_fixture_db("concerts");
  CHECK_THROWS_AS(
      execute(parse("SELECT Stadium_ID FROM stadium JOIN concert ON "
                    "stadium.Stadium_ID = concert.Stadium_ID"),
              concerts),
      ContractViolation);
}

TEST_CASE("semantic faults raise ExecutionError with the right kind") {
  Database db = load_fixture_db("products");
  auto kind_of = [&](const std::string& vql) {
    try {
      execute(parse(vql), db);
    } catch (const ExecutionError& e) {
      return e.kind();
    }
    throw std::runtime_error("expected ExecutionError: " + vql);
  };
  CHECK(kind_of("SELECT SUM(Name) FROM products") ==
        ExecutionError::Kind::AggregateOverText);
  CHECK(kind_of("SELECT AVG(Category) FROM products") ==
        ExecutionError::Kind::AggregateOverText);
  CHECK(kind_of("SELECT Name , COUNT(*) FROM products") ==
        ExecutionError::Kind::NonGroupedColumn);
  CHECK(kind_of("SELECT Name FROM products ORDER BY COUNT(Stock) ASC") ==
        ExecutionError::Kind::AggregateOrderWithoutGroupBy);
  CHECK(kind_of("SELECT Name , Price FROM products BIN Price BY YEAR") ==
        ExecutionError::Kind::UnsupportedBin);

  // HAVING without GROUP BY cannot be parsed, but a hand-built set must
  // still be rejected at runtime.
  ClauseSet cs = parse("SELECT COUNT(*) FROM products");
  cs.having = parse("SELECT Theme , COUNT(*) FROM concert GROUP BY Theme "
                    "HAVING COUNT(*) > 1")
                  .having;
  try {
    execute(cs, db);
    FAIL("expected ExecutionError");
  } catch (const ExecutionError& e) {
    CHECK(e.kind() == ExecutionError::Kind::HavingWithoutGroupBy);
  }

  // MIN/MAX over text stay legal (lexicographic).
  ResultTable r = execute(parse("SELECT MIN(Name) , MAX(Name) FROM products"), db);
  CHECK(r.rows[0][0].as_text() == "Anvil");
  CHECK(r.rows[0][1].as_text() == "Jack");
}

TEST_CASE("forward-reaching join conditions are semantic faults") {
  Database db = load_fixture_db("concerts");
  // `x` is bound by the second join, so the whole query is schema-grounded,
  // but the first condition cannot resolve it yet.
  ClauseSet cs = parse(
      "SELECT s.Name FROM stadium AS s "
      "JOIN concert AS c ON s.Stadium_ID = x.Stadium_ID "
      "JOIN concert AS x ON s.Stadium_ID = x.Stadium_ID");
  try {
    execute(cs, db);
    FAIL("expected ExecutionError");
  } catch (const ExecutionError& e) {
    CHECK(e.kind() == ExecutionError::Kind::UnboundJoinReference);
  }
}

TEST_CASE("three-valued logic drops Null comparisons on both branches") {
  Database db = load_fixture_db("products");
  // Fuse has Null Price: excluded by the filter and by its negation.
  CHECK(execute(parse("SELECT Name FROM products WHERE Price > 2.0"), db)
            .rows.size() == 7);
  CHECK(execute(parse("SELECT Name FROM products WHERE NOT ( Price > 2.0 )"), db)
            .rows.size() == 2);
}

TEST_CASE("nulls sort first ascending, stable within ties") {
  Database db = load_fixture_db("products");
  ResultTable r =
      execute(parse("SELECT Name , Stock FROM products ORDER BY Stock ASC"), db);
  CHECK(text_column(r, 0) ==
        std::vector<std::string>{"Cable", "Jack", "Inverter", "Anvil", "Drill",
                                 "Hammer", "Gasket", "Fuse", "Elbow", "Bolt"});
  ResultTable desc =
      execute(parse("SELECT Name , Stock FROM products ORDER BY Stock DESC"), db);
  CHECK(desc.rows.back()[0].as_text() == "Jack");  // nulls last under DESC
}

TEST_CASE("stable sort keeps CSV order inside equal keys") {
  Database db = load_fixture_db("products");
  ResultTable r = execute(
      parse("SELECT Name , Category FROM products ORDER BY Category ASC"), db);
  CHECK(text_column(r, 0) ==
        std::vector<std::string>{"Gasket", "Cable", "Fuse", "Inverter", "Anvil",
                                 "Bolt", "Elbow", "Drill", "Hammer", "Jack"});
}

TEST_CASE("limit truncates after ordering") {
  Database db = load_fixture_db("building");
  ResultTable r = execute(
      parse("SELECT Street_address FROM building ORDER BY Floors DESC LIMIT 2"),
      db);
  CHECK(text_column(r, 0) ==
        std::vector<std::string>{"77 Lake Drive", "25 Oak Avenue"});
  CHECK(r.ordered);
  CHECK(execute(parse("SELECT Street_address FROM building LIMIT 3"), db).ordered);
  CHECK(!execute(parse("SELECT Street_address FROM building"), db).ordered);
}

TEST_CASE("inner join on the foreign key") {
  Database db = load_fixture_db("concerts");
  ResultTable r = execute(
      parse("SELECT stadium.Name , concert.Attendance FROM stadium JOIN "
            "concert ON stadium.Stadium_ID = concert.Stadium_ID"),
      db);
  CHECK(r.rows.size() == 12);  // every concert has a stadium

  ResultTable filtered = execute(
      parse("SELECT stadium.Name FROM stadium JOIN concert ON "
            "stadium.Stadium_ID = concert.Stadium_ID WHERE concert.Year = 2022"),
      db);
  REQUIRE(filtered.rows.size() == 1);
  CHECK(filtered.rows[0][0].as_text() == "Granite Arena");
}

TEST_CASE("count ignores Nulls except COUNT(*)") {
  Database db = load_fixture_db("products");
  ResultTable r = execute(
      parse("SELECT COUNT(*) , COUNT(Stock) , COUNT(DISTINCT Category) FROM "
            "products"),
      db);
  CHECK(r.rows[0][0].as_integer() == 10);
  CHECK(r.rows[0][1].as_integer() == 8);
  CHECK(r.rows[0][2].as_integer() == 4);
}

TEST_CASE("select-level DISTINCT dedupes keeping first occurrence") {
  Database db = load_fixture_db("products");
  ResultTable r = execute(parse("SELECT DISTINCT Category FROM products"), db);
  CHECK(text_column(r, 0) ==
        std::vector<std::string>{"Hardware", "Electrical", "Tools", "Plumbing",
                                 ""});
}

TEST_CASE("star expands in binding order") {
  Database db = load_fixture_db("concerts");
  ResultTable r = execute(parse("SELECT * FROM stadium"), db);
  REQUIRE(r.columns.size() == 4);
  CHECK(r.columns[0].label == "Stadium_ID");
  CHECK(r.columns[3].label == "City");

  ResultTable joined = execute(
      parse("SELECT * FROM stadium JOIN concert ON stadium.Stadium_ID = "
            "concert.Stadium_ID"),
      db);
  CHECK(joined.columns.size() == 9);
}

TEST_CASE("order-by stability under input permutation") {
  // Same rows in two input orders; sorting by the duplicated key must keep
  // each input's own tie order, and the key sequence must agree.
  Table t1, t2;
  t1.name = t2.name = "t";
  t1.columns = t2.columns = {{"k", ColumnType::Integer, ""},
                             {"v", ColumnType::Text, ""}};
  t1.rows = {{Value(std::int64_t{2}), Value("a")},
             {Value(std::int64_t{1}), Value("b")},
             {Value(std::int64_t{2}), Value("c")},
             {Value(std::int64_t{1}), Value("d")}};
  t2.rows = {t1.rows[3], t1.rows[2], t1.rows[1], t1.rows[0]};
  Database d1 = Database::from_tables("p1", {t1});
  Database d2 = Database::from_tables("p2", {t2});
  ClauseSet q = parse("SELECT k , v FROM t ORDER BY k ASC");
  ResultTable r1 = execute(q, d1);
  ResultTable r2 = execute(q, d2);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(r1.rows[i][0].as_integer() == r2.rows[i][0].as_integer());
  CHECK(text_column(r1, 1) == std::vector<std::string>{"b", "d", "a", "c"});
  CHECK(text_column(r2, 1) == std::vector<std::string>{"d", "b", "c", "a"});
}

TEST_CASE("randomized corpus matches the brute-force oracle") {
  std::vector<Database> dbs;
  dbs.push_back(load_fixture_db("building"));
  dbs.push_back(load_fixture_db("concerts"));
  dbs.push_back(load_fixture_db("products"));
  std::mt19937_64 rng(424242);
  for (int i = 0; i < 300; ++i) {
    const Database& db = dbs[static_cast<std::size_t>(i) % dbs.size()];
    ClauseSet cs = random_query(db, rng);
    CAPTURE(assemble(cs));
    ResultTable engine = execute(cs, db);
    OracleResult expected = oracle_execute(cs, db);
    CHECK(expected.ordered == engine.ordered);
    CHECK(oracle_matches(expected, engine));
  }
}

TEST_CASE("negative corpus raises ContractViolation every time") {
  std::vector<Database> dbs;
  dbs.push_back(load_fixture_db("concerts"));
  dbs.push_back(load_fixture_db("products"));
  std::mt19937_64 rng(987);
  for (int i = 0; i < 100; ++i) {
    const Database& db = dbs[static_cast<std::size_t>(i) % dbs.size()];
    ClauseSet cs = random_broken_query(db, rng);
    CHECK_THROWS_AS(execute(cs, db), ContractViolation);
  }
}

TEST_CASE("determinism: same inputs, same serialized result") {
  Database db = load_fixture_db("concerts");
  ClauseSet cs = parse(
      "SELECT Theme , AVG(Attendance) FROM concert GROUP BY Theme ORDER BY "
      "AVG(Attendance) DESC");
  ResultTable a = execute(cs, db);
  ResultTable b = execute(parse(assemble(cs)), db);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    for (std::size_t j = 0; j < a.rows[i].size(); ++j)
      CHECK(a.rows[i][j] == b.rows[i][j]);
}

TEST_CASE("non_empty distinguishes filters from aggregates") {
  Database db = load_fixture_db("building");
  CHECK(non_empty(parse(golden_building_vql()), db));
  CHECK(!non_empty(parse("SELECT Street_address FROM building WHERE Floors > 999"), db));
  CHECK(non_empty(parse("SELECT COUNT(*) FROM t"), empty_table_db()));
}
