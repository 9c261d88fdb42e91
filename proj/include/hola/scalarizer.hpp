#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hola/common.hpp"

namespace hola {

enum class Sense { minimize, maximize };

/// One objective of the target-priority-limit scalarizer.
///
/// The sense is not stored: an objective is minimized when its target lies
/// below its limit and maximized when the target lies above it.
struct ObjectiveSpec {
  std::string name;
  double target = 0.0;
  double limit = 1.0;
  double priority = 1.0;

  Sense sense() const { return target < limit ? Sense::minimize : Sense::maximize; }

  /// Piecewise-linear cost of a single objective value.
  ///
  /// Zero at or beyond the target, `priority` at the limit, and +inf strictly
  /// past the limit. Non-finite values score +inf.
  double score(double value) const;

  /// True when `value` is on the acceptable side of the limit (inclusive).
  bool within_limit(double value) const;

  bool operator==(const ObjectiveSpec&) const = default;
};

/// The ordered set of objectives; the order is the canonical objective order.
class ObjectiveSet {
 public:
  ObjectiveSet() = default;
  explicit ObjectiveSet(std::vector<ObjectiveSpec> specs);

  /// Parses `{name: {target, limit, priority}, ...}` in document order.
  static ObjectiveSet from_json(const Json& doc);
  Json to_json() const;

  std::size_t size() const { return specs_.size(); }
  bool empty() const { return specs_.empty(); }
  const ObjectiveSpec& operator[](std::size_t i) const { return specs_[i]; }
  const std::vector<ObjectiveSpec>& specs() const { return specs_; }
  std::vector<std::string> names() const;
  std::optional<std::size_t> index_of(const std::string& name) const;

  /// Sum of per-objective scores; +inf if any objective is past its limit.
  double scalarize(std::span<const double> values) const;

  /// Same names in the same order (targets, limits and priorities may differ).
  bool same_names(const ObjectiveSet& other) const;

  /// Objective vector in canonical order from a name -> value map. Every
  /// configured name must be present and no other name may appear.
  std::vector<double> vector_from(const ObjectiveMap& values) const;
  ObjectiveMap map_from(std::span<const double> values) const;

  bool operator==(const ObjectiveSet& other) const { return specs_ == other.specs_; }

 private:
  std::vector<ObjectiveSpec> specs_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Plain dot product w.f, the classic weighted-sum scalarizer. Minimized
/// objectives take w >= 0, maximized objectives w <= 0.
double weighted_sum(std::span<const double> weights, std::span<const double> values);

}  // namespace hola
