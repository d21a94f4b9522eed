#pragma once

#include <string>

#include "json.hpp"
#include "pmvis/executor.hpp"

namespace pmvis {

enum class FieldType { Nominal, Quantitative, TemporalAsText };

std::string to_string(FieldType t);

/// Declarative chart document: a mark plus x/y encodings over inline data.
struct ChartDocument {
  ChartType mark = ChartType::Bar;
  std::string x_field;
  FieldType x_type = FieldType::Nominal;
  std::string y_field;
  FieldType y_type = FieldType::Quantitative;
  std::vector<std::pair<Value, Value>> values;  // (x, y) per row

  nlohmann::ordered_json to_json() const;
};

struct RenderVerdict {
  bool ok = false;
  std::string diagnostic;
};

/// Decides whether the clause set plus its result form a renderable chart.
/// Vacuously true without a VISUALIZE clause. Otherwise the result must have
/// exactly two projected columns with a numeric y, and per-mark rules hold:
///   BAR/PIE  x nominal or discrete (text or integer)
///   PIE      y values non-null and >= 0, x values distinct
///   LINE     x values non-null (orderable along the axis)
///   SCATTER  x numeric
/// Each rule is unit-tested on its own.
RenderVerdict is_renderable(const ClauseSet& c, const ResultTable& r);

/// Builds the chart document. Requires a VISUALIZE clause and a passing
/// is_renderable verdict; raises NotRenderable otherwise. Field names are the
/// SELECT item labels.
ChartDocument emit_chart_spec(const ClauseSet& c, const ResultTable& r);

}  // namespace pmvis
