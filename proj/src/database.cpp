#include "pmvis/database.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pmvis/errors.hpp"
#include "pmvis/text_util.hpp"

namespace pmvis {

std::string ColumnMeta::key() const { return ascii_lower(name); }
std::string Table::key() const { return ascii_lower(name); }

int Table::column_index(const std::string& n) const {
  std::string k = ascii_lower(n);
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].key() == k) return static_cast<int>(i);
  return -1;
}

namespace {

void check_cell(const Value& v, const ColumnMeta& col, std::size_t row_index) {
  if (v.is_null()) return;
  bool ok = false;
  switch (col.declared_type) {
    case ColumnType::Integer: ok = v.is_integer(); break;
    case ColumnType::Real: ok = v.is_numeric(); break;
    case ColumnType::Text: ok = v.is_text(); break;
  }
  if (!ok)
    throw StoreError(StoreError::Kind::TypeCoercion,
                     "type mismatch in " + col.table + " row " +
                         std::to_string(row_index) + " column " + col.name);
}

Value coerce_cell(const std::string& cell, const ColumnMeta& col,
                  std::size_t row_index) {
  if (cell.empty()) return Value::null();
  auto fail = [&]() -> StoreError {
    return StoreError(StoreError::Kind::TypeCoercion,
                      "cannot coerce '" + cell + "' to " +
                          to_string(col.declared_type) + " (" + col.table +
                          " row " + std::to_string(row_index) + " column " +
                          col.name + ")");
  };
  switch (col.declared_type) {
    case ColumnType::Integer: {
      // Strict integer reader: optional sign, digits, nothing else.
      std::int64_t out = 0;
      const char* b = cell.data();
      const char* e = b + cell.size();
      auto [ptr, ec] = std::from_chars(b, e, out);
      if (ec != std::errc{} || ptr != e) throw fail();
      return Value(out);
    }
    case ColumnType::Real: {
      double out = 0;
      const char* b = cell.data();
      const char* e = b + cell.size();
      auto [ptr, ec] = std::from_chars(b, e, out);
      if (ec != std::errc{} || ptr != e) throw fail();
      return Value(out);
    }
    case ColumnType::Text:
      return Value(cell);
  }
  throw fail();
}

}  // namespace

Database Database::from_tables(std::string id, std::vector<Table> tables,
                               std::vector<ForeignKey> fks) {
  Database db;
  db.id_ = std::move(id);
  db.tables_ = std::move(tables);
  db.fks_ = std::move(fks);
  for (std::size_t i = 0; i < db.tables_.size(); ++i) {
    Table& t = db.tables_[i];
    if (!db.by_key_.emplace(t.key(), i).second)
      throw StoreError(StoreError::Kind::DuplicateTableName,
                       "duplicate table name: " + t.name);
    std::set<std::string> seen;
    for (auto& c : t.columns) {
      c.table = t.key();
      if (!seen.insert(c.key()).second)
        throw StoreError(StoreError::Kind::DuplicateColumnName,
                         "duplicate column " + c.name + " in table " + t.name);
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      if (t.rows[r].size() != t.columns.size())
        throw StoreError(StoreError::Kind::BadCsv,
                         "row " + std::to_string(r) + " of " + t.name +
                             " has wrong cell count");
      for (std::size_t c = 0; c < t.columns.size(); ++c)
        check_cell(t.rows[r][c], t.columns[c], r);
    }
  }
  for (const auto& fk : db.fks_) {
    auto endpoint_ok = [&](const std::string& tbl, const std::string& col) {
      const Table* t = db.find_table(tbl);
      return t && t->column_index(col) >= 0;
    };
    if (!endpoint_ok(fk.from_table, fk.from_column) ||
        !endpoint_ok(fk.to_table, fk.to_column))
      throw StoreError(StoreError::Kind::InvalidForeignKey,
                       "foreign key endpoint missing: " + fk.from_table + "." +
                           fk.from_column + " -> " + fk.to_table + "." +
                           fk.to_column);
  }
  return db;
}

const Table* Database::find_table(const std::string& name) const {
  auto it = by_key_.find(ascii_lower(name));
  return it == by_key_.end() ? nullptr : &tables_[it->second];
}

nlohmann::ordered_json Database::to_json() const {
  nlohmann::ordered_json j;
  j["db_id"] = id_;
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : tables_) {
    nlohmann::ordered_json jt;
    jt["name"] = t.name;
    jt["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : t.columns)
      jt["columns"].push_back(
          {{"name", c.name}, {"type", to_string(c.declared_type)}});
    jt["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json jr = nlohmann::ordered_json::array();
      for (const auto& v : r) jr.push_back(v.to_json());
      jt["rows"].push_back(std::move(jr));
    }
    j["tables"].push_back(std::move(jt));
  }
  j["foreign_keys"] = nlohmann::ordered_json::array();
  for (const auto& fk : fks_)
    j["foreign_keys"].push_back({{"from", fk.from_table + "." + fk.from_column},
                                 {"to", fk.to_table + "." + fk.to_column}});
  return j;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&]() {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&]() {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < content.size()) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      ++i;
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      end_record();
      i += 2;
    } else if (c == '\n') {
      end_record();
      ++i;
    } else {
      field += c;
      field_started = true;
      ++i;
    }
  }
  if (in_quotes)
    throw StoreError(StoreError::Kind::BadCsv, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string csv_escape(const std::string& field) {
  bool need = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!need) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Database load_database(const std::filesystem::path& dir) {
  const auto schema_path = dir / "schema.json";
  if (!std::filesystem::exists(schema_path))
    throw StoreError(StoreError::Kind::MissingSchema,
                     "no schema.json in " + dir.string());
  nlohmann::json schema;
  try {
    schema = nlohmann::json::parse(read_file(schema_path));
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(StoreError::Kind::BadSchema,
                     "malformed schema.json: " + std::string(e.what()));
  }
  if (!schema.contains("db_id") || !schema.contains("tables"))
    throw StoreError(StoreError::Kind::BadSchema,
                     "schema.json needs db_id and tables");

  std::vector<Table> tables;
  for (const auto& jt : schema["tables"]) {
    Table t;
    t.name = jt.at("name").get<std::string>();
    for (const auto& jc : jt.at("columns")) {
      ColumnMeta c;
      c.name = jc.at("name").get<std::string>();
      auto ty = column_type_from_string(jc.at("type").get<std::string>());
      if (!ty)
        throw StoreError(StoreError::Kind::BadSchema,
                         "unknown column type for " + t.name + "." + c.name);
      c.declared_type = *ty;
      c.table = t.key();
      t.columns.push_back(std::move(c));
    }

    const auto csv_path = dir / (t.name + ".csv");
    if (!std::filesystem::exists(csv_path))
      throw StoreError(StoreError::Kind::MissingTableFile,
                       "missing table file: " + csv_path.string());
    auto records = parse_csv(read_file(csv_path));
    if (records.empty())
      throw StoreError(StoreError::Kind::BadCsv,
                       t.name + ".csv has no header row");
    const auto& header = records[0];
    if (header.size() != t.columns.size())
      throw StoreError(StoreError::Kind::BadCsv,
                       t.name + ".csv header width differs from schema");
    for (std::size_t c = 0; c < header.size(); ++c)
      if (ascii_lower(header[c]) != t.columns[c].key())
        throw StoreError(StoreError::Kind::BadCsv,
                         t.name + ".csv header '" + header[c] +
                             "' does not match schema column '" +
                             t.columns[c].name + "'");
    for (std::size_t r = 1; r < records.size(); ++r) {
      if (records[r].size() != t.columns.size())
        throw StoreError(StoreError::Kind::BadCsv,
                         t.name + ".csv row " + std::to_string(r) +
                             " has wrong field count");
      Row row;
      row.reserve(t.columns.size());
      for (std::size_t c = 0; c < t.columns.size(); ++c)
        row.push_back(coerce_cell(records[r][c], t.columns[c], r));
      t.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(t));
  }

  std::vector<ForeignKey> fks;
  if (schema.contains("foreign_keys")) {
    for (const auto& jf : schema["foreign_keys"]) {
      auto split = [](const std::string& s) -> std::pair<std::string, std::string> {
        auto dot = s.find('.');
        if (dot == std::string::npos)
          throw StoreError(StoreError::Kind::BadSchema,
                           "foreign key endpoint must be table.column: " + s);
        return {ascii_lower(s.substr(0, dot)), ascii_lower(s.substr(dot + 1))};
      };
      auto [ft, fc] = split(jf.at("from").get<std::string>());
      auto [tt, tc] = split(jf.at("to").get<std::string>());
      fks.push_back({ft, fc, tt, tc});
    }
  }

  return Database::from_tables(schema["db_id"].get<std::string>(),
                               std::move(tables), std::move(fks));
}

std::set<std::string> table_names(const Database& db) {
  std::set<std::string> out;
  for (const auto& t : db.tables()) out.insert(t.key());
  return out;
}

std::set<std::string> column_names(const Database& db) {
  std::set<std::string> out;
  for (const auto& t : db.tables())
    for (const auto& c : t.columns) out.insert(t.key() + "." + c.key());
  return out;
}

}  // namespace pmvis
