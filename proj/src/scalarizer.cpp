#include "hola/scalarizer.hpp"

#include <cmath>
#include <set>

#include "json_util.hpp"

namespace hola {

double ObjectiveSpec::score(double value) const {
  if (!std::isfinite(value)) {
    return kInfinity;
  }
  if (sense() == Sense::minimize) {
    if (value <= target) return 0.0;
    if (value > limit) return kInfinity;
    // Ratio first so that value == limit scores exactly the priority.
    return priority * ((value - target) / (limit - target));
  }
  if (value >= target) return 0.0;
  if (value < limit) return kInfinity;
  return priority * ((target - value) / (target - limit));
}

bool ObjectiveSpec::within_limit(double value) const {
  if (!std::isfinite(value)) return false;
  return sense() == Sense::minimize ? value <= limit : value >= limit;
}

ObjectiveSet::ObjectiveSet(std::vector<ObjectiveSpec> specs) : specs_(std::move(specs)) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& s = specs_[i];
    if (!std::isfinite(s.target) || !std::isfinite(s.limit) || !std::isfinite(s.priority)) {
      throw ConfigError("objective '" + s.name + "': target, limit and priority must be finite");
    }
    if (!(s.priority > 0.0)) {
      throw ConfigError("objective '" + s.name + "': priority must be positive");
    }
    if (s.target == s.limit) {
      throw ConfigError("objective '" + s.name + "': target equals limit, sense is ambiguous");
    }
    if (!index_.emplace(s.name, i).second) {
      throw ConfigError("duplicate objective name '" + s.name + "'");
    }
  }
}

ObjectiveSet ObjectiveSet::from_json(const Json& doc) {
  detail::require_object(doc, "objectives config");
  std::vector<ObjectiveSpec> specs;
  std::set<std::string> seen;
  for (const auto& [name, entry] : doc.items()) {
    if (!seen.insert(name).second) {
      throw ConfigError("duplicate objective name '" + name + "'");
    }
    detail::require_object(entry, "objective '" + name + "'");
    ObjectiveSpec spec;
    spec.name = name;
    spec.target = detail::require_number(entry, "target", name);
    spec.limit = detail::require_number(entry, "limit", name);
    spec.priority = detail::require_number(entry, "priority", name);
    specs.push_back(std::move(spec));
  }
  return ObjectiveSet(std::move(specs));
}

Json ObjectiveSet::to_json() const {
  Json doc = Json::object();
  for (const auto& s : specs_) {
    doc[s.name] = {{"target", s.target}, {"limit", s.limit}, {"priority", s.priority}};
  }
  return doc;
}

std::vector<std::string> ObjectiveSet::names() const {
  std::vector<std::string> out;
  out.reserve(specs_.size());
  for (const auto& s : specs_) out.push_back(s.name);
  return out;
}

std::optional<std::size_t> ObjectiveSet::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double ObjectiveSet::scalarize(std::span<const double> values) const {
  if (values.size() != specs_.size()) {
    throw std::invalid_argument("objective vector has " + std::to_string(values.size()) +
                                " entries, expected " + std::to_string(specs_.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const double c = specs_[i].score(values[i]);
    if (std::isinf(c)) return kInfinity;
    total += c;
  }
  return total;
}

bool ObjectiveSet::same_names(const ObjectiveSet& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (specs_[i].name != other.specs_[i].name) return false;
  }
  return true;
}

std::vector<double> ObjectiveSet::vector_from(const ObjectiveMap& values) const {
  std::vector<double> out(specs_.size());
  std::size_t found = 0;
  for (const auto& [name, v] : values) {
    auto idx = index_of(name);
    if (!idx) throw std::invalid_argument("unknown objective '" + name + "'");
    out[*idx] = v;
    ++found;
  }
  if (found != specs_.size()) {
    for (const auto& s : specs_) {
      if (!values.contains(s.name)) {
        throw std::invalid_argument("missing objective '" + s.name + "'");
      }
    }
  }
  return out;
}

ObjectiveMap ObjectiveSet::map_from(std::span<const double> values) const {
  if (values.size() != specs_.size()) {
    throw std::invalid_argument("objective vector length mismatch");
  }
  ObjectiveMap out;
  for (std::size_t i = 0; i < specs_.size(); ++i) out[specs_[i].name] = values[i];
  return out;
}

double weighted_sum(std::span<const double> weights, std::span<const double> values) {
  if (weights.size() != values.size()) {
    throw std::invalid_argument("weighted_sum: weight and value lengths differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * values[i];
  return acc;
}

}  // namespace hola
