#pragma once

#include <json.hpp>

#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace hola {

// Key order of configuration documents is significant (it fixes the canonical
// parameter and objective order), so every document is an ordered_json.
using Json = nlohmann::ordered_json;

using ParamMap = std::map<std::string, double>;
using ObjectiveMap = std::map<std::string, double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised for malformed or inconsistent configuration documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hola
