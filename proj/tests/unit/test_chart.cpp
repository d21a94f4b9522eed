#include "doctest.h"
#include "pmvis/chart.hpp"
#include "pmvis/errors.hpp"
#include "support/fixtures.hpp"

using namespace pmvis;
using namespace pmvis::testing;

namespace {

Database pie_db() {
  Table t;
  t.name = "t";
  t.columns = {{"label", ColumnType::Text, ""}, {"delta", ColumnType::Integer, ""}};
  t.rows = {{Value("a"), Value(std::int64_t{5})},
            {Value("b"), Value(std::int64_t{-2})}};
  return Database::from_tables("pie", {t});
}

}  // namespace

TEST_CASE("case study bar chart is renderable") {
  Database db = load_fixture_db("building");
  ClauseSet cs = parse(golden_building_vql());
  ResultTable r = execute(cs, db);
  CHECK(is_renderable(cs, r).ok);
}

TEST_CASE("no VISUALIZE clause is vacuously renderable") {
  Database db = load_fixture_db("building");
  ClauseSet cs = parse("SELECT Street_address , Floors FROM building");
  CHECK(is_renderable(cs, execute(cs, db)).ok);
}

TEST_CASE("pie rejects negative slices") {
  Database db = pie_db();
  ClauseSet cs = parse("VISUALIZE PIE SELECT label , delta FROM t");
  RenderVerdict v = is_renderable(cs, execute(cs, db));
  CHECK(!v.ok);
  CHECK(v.diagnostic == "negative slice");
}

TEST_CASE("pie rejects duplicate and null slices") {
  Table t;
  t.name = "t";
  t.columns = {{"label", ColumnType::Text, ""}, {"y", ColumnType::Integer, ""}};
  t.rows = {{Value("a"), Value(std::int64_t{1})},
            {Value("a"), Value(std::int64_t{2})}};
  Database dup = Database::from_tables("dup", {t});
  ClauseSet cs = parse("VISUALIZE PIE SELECT label , y FROM t");
  CHECK(is_renderable(cs, execute(cs, dup)).diagnostic == "duplicate slice label");

  t.rows = {{Value("a"), Value::null()}};
  Database withnull = Database::from_tables("n", {t});
  CHECK(is_renderable(cs, execute(cs, withnull)).diagnostic == "null slice");
}

TEST_CASE("shape rules per mark") {
  Database db = load_fixture_db("products");

  ClauseSet three = parse("VISUALIZE BAR SELECT Name , Price , Stock FROM products");
  CHECK(!is_renderable(three, execute(three, db)).ok);

  ClauseSet text_y = parse("VISUALIZE BAR SELECT Price , Name FROM products");
  CHECK(!is_renderable(text_y, execute(text_y, db)).ok);

  ClauseSet real_x = parse("VISUALIZE BAR SELECT Price , Stock FROM products");
  CHECK(!is_renderable(real_x, execute(real_x, db)).ok);

  ClauseSet scatter_text_x = parse("VISUALIZE SCATTER SELECT Name , Stock FROM products");
  CHECK(!is_renderable(scatter_text_x, execute(scatter_text_x, db)).ok);

  ClauseSet scatter_ok = parse(
      "VISUALIZE SCATTER SELECT Stock , Price FROM products WHERE Stock > 0");
  CHECK(is_renderable(scatter_ok, execute(scatter_ok, db)).ok);

  // Stock holds Nulls, so a line over it is not orderable.
  ClauseSet line_null_x = parse("VISUALIZE LINE SELECT Stock , Price FROM products");
  CHECK(!is_renderable(line_null_x, execute(line_null_x, db)).ok);

  ClauseSet line_text_x = parse(
      "VISUALIZE LINE SELECT Name , Price FROM products WHERE Price > 1");
  CHECK(is_renderable(line_text_x, execute(line_text_x, db)).ok);
}

TEST_CASE("chart document fields are exact") {
  Database db = load_fixture_db("building");
  ClauseSet cs = parse(golden_building_vql());
  ResultTable r = execute(cs, db);
  ChartDocument doc = emit_chart_spec(cs, r);
  CHECK(doc.mark == ChartType::Bar);
  CHECK(doc.x_field == "Street_address");
  CHECK(doc.y_field == "Floors");
  CHECK(doc.values.size() == 5);

  auto j = doc.to_json();
  CHECK(j["mark"] == "bar");
  CHECK(j["encoding"]["x"]["field"] == "Street_address");
  CHECK(j["encoding"]["x"]["type"] == "nominal");
  CHECK(j["encoding"]["y"]["field"] == "Floors");
  CHECK(j["encoding"]["y"]["type"] == "quantitative");
  REQUIRE(j["data"]["values"].size() == 5);
  CHECK(j["data"]["values"][0]["Street_address"] == "800 Pine Road");
  CHECK(j["data"]["values"][0]["Floors"] == 3);
}

TEST_CASE("emit requires a chart clause") {
  Database db = load_fixture_db("building");
  ClauseSet cs = parse("SELECT Street_address , Floors FROM building");
  CHECK_THROWS_AS(emit_chart_spec(cs, execute(cs, db)), NotRenderable);
}

TEST_CASE("grouped line chart gets a quantitative x") {
  Database db = load_fixture_db("concerts");
  ClauseSet cs = parse(
      "VISUALIZE LINE SELECT Year , COUNT(*) FROM concert GROUP BY Year "
      "ORDER BY Year ASC");
  ChartDocument doc = emit_chart_spec(cs, execute(cs, db));
  CHECK(doc.x_type == FieldType::Quantitative);
  CHECK(doc.y_field == "COUNT(*)");
}
