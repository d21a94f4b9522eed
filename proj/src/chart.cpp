#include "pmvis/chart.hpp"

#include "pmvis/errors.hpp"
#include "pmvis/text_util.hpp"

namespace pmvis {

std::string to_string(FieldType t) {
  switch (t) {
    case FieldType::Nominal: return "nominal";
    case FieldType::Quantitative: return "quantitative";
    case FieldType::TemporalAsText: return "temporal-as-text";
  }
  return "?";
}

nlohmann::ordered_json ChartDocument::to_json() const {
  nlohmann::ordered_json j;
  j["mark"] = ascii_lower(to_keyword(mark));
  j["encoding"] = {
      {"x", {{"field", x_field}, {"type", to_string(x_type)}}},
      {"y", {{"field", y_field}, {"type", to_string(y_type)}}},
  };
  j["data"]["values"] = nlohmann::ordered_json::array();
  for (const auto& [x, y] : values) {
    nlohmann::ordered_json row;
    row[x_field] = x.to_json();
    row[y_field] = y.to_json();
    j["data"]["values"].push_back(std::move(row));
  }
  return j;
}

namespace {

bool numeric_type(ColumnType t) {
  return t == ColumnType::Integer || t == ColumnType::Real;
}

}  // namespace

RenderVerdict is_renderable(const ClauseSet& c, const ResultTable& r) {
  if (!c.visualize) return {true, "no chart clause"};
  const ChartType mark = c.visualize->chart;

  if (r.columns.size() != 2)
    return {false, "chart needs exactly 2 projected columns, got " +
                       std::to_string(r.columns.size())};

  const ColumnType x_type = r.columns[0].type;
  const ColumnType y_type = r.columns[1].type;

  if (!numeric_type(y_type)) return {false, "y axis must be numeric"};

  switch (mark) {
    case ChartType::Bar:
    case ChartType::Pie:
      if (x_type == ColumnType::Real)
        return {false, "x axis must be nominal or discrete for " +
                           to_keyword(mark)};
      break;
    case ChartType::Line:
      break;
    case ChartType::Scatter:
      if (!numeric_type(x_type))
        return {false, "x axis must be numeric for SCATTER"};
      break;
  }

  if (mark == ChartType::Pie) {
    for (const auto& row : r.rows) {
      if (row[1].is_null()) return {false, "null slice"};
      if (row[1].numeric() < 0) return {false, "negative slice"};
    }
    for (std::size_t i = 0; i < r.rows.size(); ++i)
      for (std::size_t j = i + 1; j < r.rows.size(); ++j)
        if (r.rows[i][0] == r.rows[j][0])
          return {false, "duplicate slice label"};
  }

  if (mark == ChartType::Line) {
    for (const auto& row : r.rows)
      if (row[0].is_null())
        return {false, "line chart x values must be orderable; found null"};
  }

  return {true, "renderable"};
}

ChartDocument emit_chart_spec(const ClauseSet& c, const ResultTable& r) {
  if (!c.visualize) throw NotRenderable("no VISUALIZE clause");
  RenderVerdict verdict = is_renderable(c, r);
  if (!verdict.ok) throw NotRenderable(verdict.diagnostic);

  ChartDocument doc;
  doc.mark = c.visualize->chart;
  doc.x_field = r.columns[0].label;
  doc.y_field = r.columns[1].label;
  doc.x_type = r.columns[0].type == ColumnType::Text ? FieldType::Nominal
                                                     : FieldType::Quantitative;
  doc.y_type = FieldType::Quantitative;
  for (const auto& row : r.rows) doc.values.emplace_back(row[0], row[1]);
  return doc;
}

}  // namespace pmvis
