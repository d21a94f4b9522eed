#pragma once

#include <filesystem>
#include <string>

#include "pmvis/database.hpp"

namespace pmvis::testing {

std::filesystem::path fixture_dir();
std::filesystem::path fixture_db_dir(const std::string& name);

/// Loads tests/fixtures/db/<name>.
Database load_fixture_db(const std::string& name);

/// In-memory: table t(a integer, b text) with no rows.
Database empty_table_db();

/// In-memory: one table with two *_address columns, for intent-ambiguity
/// tests.
Database offices_db();

/// The golden building query the fixtures revolve around, canonical form.
std::string golden_building_vql();

}  // namespace pmvis::testing
