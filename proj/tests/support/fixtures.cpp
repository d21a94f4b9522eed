#include "support/fixtures.hpp"

namespace pmvis::testing {

std::filesystem::path fixture_dir() { return PMVIS_FIXTURE_DIR; }

std::filesystem::path fixture_db_dir(const std::string& name) {
  return fixture_dir() / "db" / name;
}

Database load_fixture_db(const std::string& name) {
  return load_database(fixture_db_dir(name));
}

Database empty_table_db() {
  Table t;
  t.name = "t";
  t.columns = {{"a", ColumnType::Integer, "t"}, {"b", ColumnType::Text, "t"}};
  return Database::from_tables("empty", {t});
}

Database offices_db() {
  Table t;
  t.name = "offices";
  t.columns = {{"Office_ID", ColumnType::Integer, "offices"},
               {"Home_address", ColumnType::Text, "offices"},
               {"Work_address", ColumnType::Text, "offices"},
               {"Staff", ColumnType::Integer, "offices"}};
  t.rows = {
      {Value(std::int64_t{1}), Value("12 Elm Street"), Value("400 Tower Lane"),
       Value(std::int64_t{30})},
      {Value(std::int64_t{2}), Value("9 Birch Way"), Value("401 Tower Lane"),
       Value(std::int64_t{55})},
      {Value(std::int64_t{3}), Value("77 Cedar Court"), Value("402 Tower Lane"),
       Value(std::int64_t{12})},
  };
  return Database::from_tables("offices", {t});
}

std::string golden_building_vql() {
  return "VISUALIZE BAR SELECT Street_address, Floors FROM building "
         "ORDER BY Floors ASC";
}

}  // namespace pmvis::testing
