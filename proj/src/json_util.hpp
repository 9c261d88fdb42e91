#pragma once

#include <string>

#include "hola/common.hpp"

namespace hola::detail {

inline double require_number(const Json& obj, const char* key, const std::string& owner) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError("'" + owner + "': missing field '" + key + "'");
  }
  if (!it->is_number()) {
    throw ConfigError("'" + owner + "': field '" + key + "' must be a number");
  }
  return it->get<double>();
}

inline void require_object(const Json& doc, const std::string& what) {
  if (!doc.is_object()) {
    throw ConfigError(what + " must be a key-value object");
  }
}

}  // namespace hola::detail
