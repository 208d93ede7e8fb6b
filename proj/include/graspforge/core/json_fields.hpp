#pragma once

// Helpers for strict config objects: unknown keys and badly typed values
// become ConfigError.

#include <initializer_list>
#include <string>
#include <string_view>

#include "graspforge/core/error.hpp"
#include "json.hpp"

namespace graspforge::json_fields {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known,
                           std::string_view what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || k == key;
    if (!ok) throw ConfigError("unknown " + std::string(what) + " key \"" + key + "\"");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
  }
}

}  // namespace graspforge::json_fields
