#include "pmvis/value.hpp"

#include <charconv>

namespace pmvis {

std::string to_string(ColumnType t) {
  switch (t) {
    case ColumnType::Integer: return "integer";
    case ColumnType::Real: return "real";
    case ColumnType::Text: return "text";
  }
  return "?";
}

std::optional<ColumnType> column_type_from_string(const std::string& s) {
  if (s == "integer") return ColumnType::Integer;
  if (s == "real") return ColumnType::Real;
  if (s == "text") return ColumnType::Text;
  return std::nullopt;
}

bool Value::operator==(const Value& o) const {
  if (is_null() || o.is_null()) return is_null() && o.is_null();
  if (is_numeric() && o.is_numeric()) {
    if (is_integer() && o.is_integer()) return as_integer() == o.as_integer();
    return numeric() == o.numeric();
  }
  if (is_text() && o.is_text()) return as_text() == o.as_text();
  return false;
}

nlohmann::ordered_json Value::to_json() const {
  if (is_null()) return nullptr;
  if (is_integer()) return as_integer();
  if (is_real()) return as_real();
  return as_text();
}

std::string Value::to_display() const {
  if (is_null()) return "";
  if (is_integer()) return std::to_string(as_integer());
  if (is_real()) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, as_real());
    return std::string(buf, ptr);
  }
  return as_text();
}

namespace {
int value_class(const Value& v) {
  if (v.is_null()) return 0;
  if (v.is_numeric()) return 1;
  return 2;
}
}  // namespace

int compare_values(const Value& a, const Value& b) {
  int ca = value_class(a), cb = value_class(b);
  if (ca != cb) return ca < cb ? -1 : 1;
  switch (ca) {
    case 0:
      return 0;
    case 1: {
      if (a.is_integer() && b.is_integer()) {
        auto x = a.as_integer(), y = b.as_integer();
        return x < y ? -1 : (x > y ? 1 : 0);
      }
      double x = a.numeric(), y = b.numeric();
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    default: {
      int c = a.as_text().compare(b.as_text());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
  }
}

std::optional<int> compare_for_predicate(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return std::nullopt;
  if (a.is_numeric() != b.is_numeric()) return std::nullopt;
  return compare_values(a, b);
}

}  // namespace pmvis
