#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

namespace pmvis {

/// Declared column types. Type inference is never used; schema.json decides.
enum class ColumnType { Integer, Real, Text };

std::string to_string(ColumnType t);
std::optional<ColumnType> column_type_from_string(const std::string& s);

/// A single cell: Null, 64-bit integer, double, or unicode text.
///
/// Comparison rules: Integer vs Real coerces the integer; Text compares
/// case-sensitively by code point; Null equals only Null and sorts first.
class Value {
 public:
  Value() : v_(std::monostate{}) {}
  explicit Value(std::int64_t i) : v_(i) {}
  explicit Value(double d) : v_(d) {}
  explicit Value(std::string s) : v_(std::move(s)) {}

  static Value null() { return Value(); }

  bool is_null() const { return std::holds_alternative<std::monostate>(v_); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_real() const { return std::holds_alternative<double>(v_); }
  bool is_text() const { return std::holds_alternative<std::string>(v_); }
  bool is_numeric() const { return is_integer() || is_real(); }

  std::int64_t as_integer() const { return std::get<std::int64_t>(v_); }
  double as_real() const { return std::get<double>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }

  /// Numeric view with Integer coerced to Real.
  double numeric() const {
    return is_integer() ? static_cast<double>(as_integer()) : as_real();
  }

  /// Coercing equality: Integer 5 equals Real 5.0. Null equals only Null.
  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }

  nlohmann::ordered_json to_json() const;
  std::string to_display() const;

 private:
  std::variant<std::monostate, std::int64_t, double, std::string> v_;
};

/// Total order used for sorting and multiset comparison: Null first, then
/// numerics by coerced value, then text by code point. Incompatible classes
/// order numeric-before-text. Returns <0, 0, >0.
int compare_values(const Value& a, const Value& b);

/// Three-valued comparison for predicates: nullopt when either side is Null
/// or the sides are not comparable (text vs number).
std::optional<int> compare_for_predicate(const Value& a, const Value& b);

}  // namespace pmvis
