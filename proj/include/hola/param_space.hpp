#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hola/common.hpp"

namespace hola {

enum class Scale { linear, log };

/// One hyper-parameter: its range, scale and discrete structure.
///
/// Structure is expressed by three independent attributes, matching the
/// configuration document:
///   - `grid`:    N equally spaced values on the declared scale,
///   - `integer`: values rounded to integers in [ceil(lower), floor(upper)],
///   - `values`:  an explicit sorted set (lower/upper are its min/max).
/// `grid` and `integer` may be combined; the grid is applied first and the
/// un-standardized grid value is then rounded to the nearest integer.
struct ParamSpec {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  Scale scale = Scale::linear;
  std::optional<int> grid;
  bool integer = false;
  std::vector<double> values;

  bool is_value_set() const { return !values.empty(); }
  bool is_discrete() const { return grid.has_value() || integer || is_value_set(); }

  bool operator==(const ParamSpec&) const = default;
};

/// Per-parameter map between raw values and the standardized unit interval.
class ParamAxis {
 public:
  explicit ParamAxis(ParamSpec spec);

  const ParamSpec& spec() const { return spec_; }

  double standardize(double x) const;
  double unstandardize(double z) const;
  double project(double z) const;

  /// Valid raw values in increasing order. Throws for continuous parameters.
  const std::vector<double>& valid_values() const;
  /// Standardized position of each valid value (same order).
  const std::vector<double>& valid_positions() const { return positions_; }

  bool contains(double x) const;

 private:
  double to_unit(double x) const;
  double from_unit(double z) const;
  std::size_t nearest_position(double z) const;

  ParamSpec spec_;
  double lo_;  // lower/upper on the working scale (log for Scale::log)
  double hi_;
  std::vector<double> members_;    // raw valid values
  std::vector<double> positions_;  // standardized anchors
  std::vector<double> anchor_values_;  // raw value returned for each anchor
};

/// Ordered search space: the canonical coordinate order of x and z.
class ParamSpace {
 public:
  ParamSpace() = default;
  explicit ParamSpace(std::vector<ParamSpec> specs);

  /// Parses `{name: {min, max, scale, grid, param_type, values}, ...}`.
  static ParamSpace from_json(const Json& doc);
  Json to_json() const;

  std::size_t dimension() const { return axes_.size(); }
  const ParamAxis& axis(std::size_t i) const { return axes_[i]; }
  const ParamSpec& spec(std::size_t i) const { return axes_[i].spec(); }
  std::vector<std::string> names() const;
  std::optional<std::size_t> index_of(const std::string& name) const;

  /// Raw point to [0,1]^n. Throws std::out_of_range outside the bounds.
  std::vector<double> standardize(std::span<const double> x) const;
  /// Standardized point to raw point. Throws std::invalid_argument when a
  /// coordinate is not a valid standardized value (call project first).
  std::vector<double> unstandardize(std::span<const double> z) const;
  /// Clip to [0,1]^n, then snap discrete coordinates to the nearest valid
  /// standardized value (ties go to the lower value). Idempotent.
  std::vector<double> project(std::span<const double> z) const;
  /// unstandardize(project(z)): always a member of the space.
  std::vector<double> to_raw(std::span<const double> z) const;

  bool contains(std::span<const double> x) const;

  std::vector<double> vector_from(const ParamMap& values) const;
  ParamMap map_from(std::span<const double> x) const;

  bool operator==(const ParamSpace& other) const;

 private:
  std::vector<ParamAxis> axes_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Sorted list of valid raw values of a discrete parameter.
std::vector<double> enumerate_valid(const ParamSpec& spec);

}  // namespace hola
