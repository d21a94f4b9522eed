#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmvis/value.hpp"

namespace pmvis {

using Row = std::vector<Value>;

struct ColumnMeta {
  std::string name;  // stored casing, preserved for display
  ColumnType declared_type = ColumnType::Text;
  std::string table;

  /// Lowercase lookup key.
  std::string key() const;
};

struct Table {
  std::string name;
  std::vector<ColumnMeta> columns;
  std::vector<Row> rows;

  std::string key() const;
  /// Index of a column by case-insensitive name, or -1.
  int column_index(const std::string& name) const;
};

struct ForeignKey {
  std::string from_table, from_column;  // lowercase keys
  std::string to_table, to_column;
};

/// An immutable schema catalog plus in-memory rows. Safe to share across
/// concurrent readers once loaded.
class Database {
 public:
  /// Builds from parts, enforcing catalog invariants (distinct table names,
  /// distinct columns per table, rectangular typed rows, valid FKs).
  static Database from_tables(std::string id, std::vector<Table> tables,
                              std::vector<ForeignKey> fks = {});

  const std::string& id() const { return id_; }
  const std::vector<Table>& tables() const { return tables_; }
  const std::vector<ForeignKey>& foreign_keys() const { return fks_; }

  /// Case-insensitive table lookup; nullptr when absent.
  const Table* find_table(const std::string& name) const;

  nlohmann::ordered_json to_json() const;

 private:
  Database() = default;
  std::string id_;
  std::vector<Table> tables_;
  std::map<std::string, std::size_t> by_key_;
  std::vector<ForeignKey> fks_;
};

/// Loads `schema.json` plus one RFC-4180 `<table>.csv` per declared table.
/// Empty cells become Null; every other cell must coerce to the declared type.
Database load_database(const std::filesystem::path& dir);

/// Catalog table names, lowercase-normalized.
std::set<std::string> table_names(const Database& db);

/// Catalog columns as lowercase `table.column`.
std::set<std::string> column_names(const Database& db);

/// Parses one RFC-4180 document into records of fields. Exposed for the CLI
/// result printer's round-trip tests.
std::vector<std::vector<std::string>> parse_csv(const std::string& content);
std::string csv_escape(const std::string& field);

}  // namespace pmvis
