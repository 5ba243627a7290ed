#pragma once

// Private helpers shared by the JSON readers in core. Not installed.

#include <json.hpp>
#include <string>
#include <string_view>

#include "brm/errors.hpp"

namespace brm::detail {

inline nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
}

// Offset of the first occurrence of "key" in the raw payload, so schema
// errors can still point somewhere useful.
inline std::size_t key_offset(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  return pos == std::string_view::npos ? 0 : pos;
}

}  // namespace brm::detail
