#pragma once

#include <string>

namespace ars {

// Parses a practical TOML subset into canonical JSON text: [table] and
// [nested.table] headers, bare keys, strings, integers, floats, booleans and
// flat arrays, with # comments. Dates, multi-line strings, inline tables and
// arrays-of-tables are not part of the subset and are rejected.
std::string toml_to_json_text(const std::string& toml_text);

}  // namespace ars
