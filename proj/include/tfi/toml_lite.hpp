#ifndef TFI_TOML_LITE_HPP
#define TFI_TOML_LITE_HPP

#include <string>

#include <json.hpp>

namespace tfi {

// Minimal TOML reader covering the scenario-file subset: comments,
// [table] / [[array-of-tables]] headers (dotted names allowed), and
// key = value pairs with strings, numbers, booleans and (nested) arrays.
// Errors carry 1-based line numbers.
nlohmann::json parse_toml_lite(const std::string& text);

}  // namespace tfi

#endif
