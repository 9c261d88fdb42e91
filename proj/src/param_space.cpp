#include "hola/param_space.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"

namespace hola {
namespace {

constexpr double kOnGridTolerance = 1e-9;
constexpr double kMaxEnumerated = 1 << 20;

bool near(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

void validate(ParamSpec& s) {
  auto fail = [&](const std::string& msg) { throw ConfigError("parameter '" + s.name + "': " + msg); };
  if (s.is_value_set()) {
    if (s.grid) fail("'values' cannot be combined with 'grid'");
    for (double v : s.values) {
      if (!std::isfinite(v)) fail("values must be finite");
      if (s.integer && v != std::round(v)) fail("integer parameter has a non-integer value");
    }
    std::sort(s.values.begin(), s.values.end());
    s.values.erase(std::unique(s.values.begin(), s.values.end()), s.values.end());
    if (s.values.size() < 2) fail("'values' needs at least two distinct entries");
    s.lower = s.values.front();
    s.upper = s.values.back();
  }
  if (!std::isfinite(s.lower) || !std::isfinite(s.upper)) fail("bounds must be finite");
  if (!(s.lower < s.upper)) fail("min must be smaller than max");
  if (s.scale == Scale::log && !(s.lower > 0.0)) fail("logarithmic scale requires min > 0");
  if (s.grid && *s.grid < 2) fail("grid needs at least 2 points");
  if (s.integer && !s.is_value_set() && std::ceil(s.lower) > std::floor(s.upper)) {
    fail("integer range [ceil(min), floor(max)] is empty");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamAxis

ParamAxis::ParamAxis(ParamSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  if (spec_.scale == Scale::log) {
    lo_ = std::log(spec_.lower);
    hi_ = std::log(spec_.upper);
  } else {
    lo_ = spec_.lower;
    hi_ = spec_.upper;
  }

  if (spec_.is_value_set()) {
    members_ = spec_.values;
    anchor_values_ = members_;
    for (double v : members_) positions_.push_back(to_unit(v));
    positions_.front() = 0.0;
    positions_.back() = 1.0;
  } else if (spec_.grid) {
    const int n = *spec_.grid;
    const double int_lo = std::ceil(spec_.lower);
    const double int_hi = std::floor(spec_.upper);
    for (int k = 0; k < n; ++k) {
      const double z = static_cast<double>(k) / (n - 1);
      double v = from_unit(z);
      if (spec_.integer) v = std::clamp(std::round(v), int_lo, int_hi);
      positions_.push_back(z);
      anchor_values_.push_back(v);
    }
    members_ = anchor_values_;
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  } else if (spec_.integer) {
    // Projection on integer-only axes is analytic; the member list is only
    // materialized for ranges small enough to enumerate.
    const double count = std::floor(spec_.upper) - std::ceil(spec_.lower) + 1.0;
    if (count <= kMaxEnumerated) members_ = enumerate_valid(spec_);
  }
}

double ParamAxis::to_unit(double x) const {
  if (x == spec_.lower) return 0.0;
  if (x == spec_.upper) return 1.0;
  const double w = spec_.scale == Scale::log ? std::log(x) : x;
  return (w - lo_) / (hi_ - lo_);
}

double ParamAxis::from_unit(double z) const {
  if (z <= 0.0) return spec_.lower;
  if (z >= 1.0) return spec_.upper;
  const double w = lo_ + z * (hi_ - lo_);
  const double x = spec_.scale == Scale::log ? std::exp(w) : w;
  return std::clamp(x, spec_.lower, spec_.upper);
}

std::size_t ParamAxis::nearest_position(double z) const {
  auto it = std::lower_bound(positions_.begin(), positions_.end(), z);
  if (it == positions_.begin()) return 0;
  if (it == positions_.end()) return positions_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - positions_.begin());
  const std::size_t lo = hi - 1;
  return (z - positions_[lo] <= positions_[hi] - z) ? lo : hi;
}

double ParamAxis::standardize(double x) const {
  if (!(x >= spec_.lower && x <= spec_.upper)) {
    throw std::out_of_range("parameter '" + spec_.name + "': value " + std::to_string(x) +
                            " outside [" + std::to_string(spec_.lower) + ", " +
                            std::to_string(spec_.upper) + "]");
  }
  return to_unit(x);
}

double ParamAxis::project(double z) const {
  if (std::isnan(z)) z = 0.0;
  z = std::clamp(z, 0.0, 1.0);
  if (!positions_.empty()) return positions_[nearest_position(z)];
  if (spec_.integer) {
    const double x = from_unit(z);
    const double lo = std::max(std::floor(x), std::ceil(spec_.lower));
    const double hi = std::min(std::ceil(x), std::floor(spec_.upper));
    const double zl = to_unit(lo);
    const double zh = to_unit(hi);
    return (z - zl <= zh - z) ? zl : zh;
  }
  return z;
}

double ParamAxis::unstandardize(double z) const {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw std::invalid_argument("parameter '" + spec_.name + "': standardized value " +
                                std::to_string(z) + " outside [0, 1]");
  }
  if (!positions_.empty()) {
    const std::size_t i = nearest_position(z);
    if (std::abs(positions_[i] - z) > kOnGridTolerance) {
      throw std::invalid_argument("parameter '" + spec_.name + "': standardized value " +
                                  std::to_string(z) + " is not a valid grid position");
    }
    return anchor_values_[i];
  }
  const double x = from_unit(z);
  if (spec_.integer) {
    const double k = std::clamp(std::round(x), std::ceil(spec_.lower), std::floor(spec_.upper));
    if (std::abs(to_unit(k) - z) > kOnGridTolerance) {
      throw std::invalid_argument("parameter '" + spec_.name + "': standardized value " +
                                  std::to_string(z) + " is not a standardized integer");
    }
    return k;
  }
  return x;
}

const std::vector<double>& ParamAxis::valid_values() const {
  if (!spec_.is_discrete()) {
    throw std::logic_error("parameter '" + spec_.name + "' is continuous");
  }
  if (members_.empty()) {
    throw std::length_error("parameter '" + spec_.name + "': too many integer values to list");
  }
  return members_;
}

bool ParamAxis::contains(double x) const {
  if (!std::isfinite(x) || x < spec_.lower || x > spec_.upper) return false;
  if (!members_.empty() && (spec_.grid || spec_.is_value_set())) {
    auto it = std::lower_bound(members_.begin(), members_.end(), x);
    if (it != members_.end() && near(x, *it)) return true;
    return it != members_.begin() && near(x, *(it - 1));
  }
  if (spec_.integer) return x == std::round(x);
  return true;
}

// ---------------------------------------------------------------------------
// ParamSpace

ParamSpace::ParamSpace(std::vector<ParamSpec> specs) {
  axes_.reserve(specs.size());
  for (auto& s : specs) {
    const std::string name = s.name;
    if (!index_.emplace(name, axes_.size()).second) {
      throw ConfigError("duplicate parameter name '" + name + "'");
    }
    axes_.emplace_back(std::move(s));
  }
}

ParamSpace ParamSpace::from_json(const Json& doc) {
  detail::require_object(doc, "params config");
  std::vector<ParamSpec> specs;
  for (const auto& [name, entry] : doc.items()) {
    detail::require_object(entry, "parameter '" + name + "'");
    ParamSpec s;
    s.name = name;
    for (const auto& [key, _] : entry.items()) {
      if (key != "min" && key != "max" && key != "scale" && key != "grid" &&
          key != "param_type" && key != "values") {
        throw ConfigError("parameter '" + name + "': unknown option '" + key + "'");
      }
    }
    if (auto it = entry.find("values"); it != entry.end()) {
      if (!it->is_array()) throw ConfigError("parameter '" + name + "': 'values' must be a list");
      if (entry.contains("min") || entry.contains("max")) {
        throw ConfigError("parameter '" + name + "': 'values' cannot be combined with min/max");
      }
      for (const auto& v : *it) {
        if (!v.is_number()) throw ConfigError("parameter '" + name + "': values must be numbers");
        s.values.push_back(v.get<double>());
      }
      if (s.values.size() < 2) {
        throw ConfigError("parameter '" + name + "': 'values' needs at least two entries");
      }
    } else {
      s.lower = detail::require_number(entry, "min", name);
      s.upper = detail::require_number(entry, "max", name);
    }
    if (auto it = entry.find("scale"); it != entry.end()) {
      const auto scale = it->is_string() ? it->get<std::string>() : std::string{};
      if (scale == "linear" || scale == "lin") {
        s.scale = Scale::linear;
      } else if (scale == "log" || scale == "logarithmic") {
        s.scale = Scale::log;
      } else {
        throw ConfigError("parameter '" + name + "': scale must be 'linear' or 'log'");
      }
    }
    if (auto it = entry.find("grid"); it != entry.end()) {
      if (!it->is_number() || it->get<double>() != std::floor(it->get<double>())) {
        throw ConfigError("parameter '" + name + "': grid must be an integer");
      }
      const double n = it->get<double>();
      if (n < 2) throw ConfigError("parameter '" + name + "': grid needs at least 2 points");
      s.grid = static_cast<int>(n);
    }
    if (auto it = entry.find("param_type"); it != entry.end()) {
      const auto type = it->is_string() ? it->get<std::string>() : std::string{};
      if (type == "int" || type == "integer") {
        s.integer = true;
      } else if (type != "float" && type != "real" && type != "double" && type != "continuous") {
        throw ConfigError("parameter '" + name + "': unknown param_type '" + type + "'");
      }
    }
    specs.push_back(std::move(s));
  }
  return ParamSpace(std::move(specs));
}

Json ParamSpace::to_json() const {
  Json doc = Json::object();
  for (const auto& axis : axes_) {
    const auto& s = axis.spec();
    Json entry = Json::object();
    if (s.is_value_set()) {
      entry["values"] = s.values;
    } else {
      entry["min"] = s.lower;
      entry["max"] = s.upper;
    }
    if (s.integer) entry["param_type"] = "int";
    if (s.scale == Scale::log) entry["scale"] = "log";
    if (s.grid) entry["grid"] = *s.grid;
    doc[s.name] = std::move(entry);
  }
  return doc;
}

std::vector<std::string> ParamSpace::names() const {
  std::vector<std::string> out;
  for (const auto& a : axes_) out.push_back(a.spec().name);
  return out;
}

std::optional<std::size_t> ParamSpace::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {
void check_length(std::size_t got, std::size_t want) {
  if (got != want) {
    throw std::invalid_argument("point has " + std::to_string(got) + " coordinates, expected " +
                                std::to_string(want));
  }
}
}  // namespace

std::vector<double> ParamSpace::standardize(std::span<const double> x) const {
  check_length(x.size(), axes_.size());
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = axes_[i].standardize(x[i]);
  return z;
}

std::vector<double> ParamSpace::unstandardize(std::span<const double> z) const {
  check_length(z.size(), axes_.size());
  std::vector<double> x(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) x[i] = axes_[i].unstandardize(z[i]);
  return x;
}

std::vector<double> ParamSpace::project(std::span<const double> z) const {
  check_length(z.size(), axes_.size());
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = axes_[i].project(z[i]);
  return out;
}

std::vector<double> ParamSpace::to_raw(std::span<const double> z) const {
  return unstandardize(project(z));
}

bool ParamSpace::contains(std::span<const double> x) const {
  if (x.size() != axes_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!axes_[i].contains(x[i])) return false;
  }
  return true;
}

std::vector<double> ParamSpace::vector_from(const ParamMap& values) const {
  std::vector<double> x(axes_.size());
  for (const auto& [name, v] : values) {
    auto idx = index_of(name);
    if (!idx) throw std::invalid_argument("unknown parameter '" + name + "'");
    x[*idx] = v;
  }
  for (const auto& a : axes_) {
    if (!values.contains(a.spec().name)) {
      throw std::invalid_argument("missing parameter '" + a.spec().name + "'");
    }
  }
  return x;
}

ParamMap ParamSpace::map_from(std::span<const double> x) const {
  check_length(x.size(), axes_.size());
  ParamMap out;
  for (std::size_t i = 0; i < x.size(); ++i) out[axes_[i].spec().name] = x[i];
  return out;
}

bool ParamSpace::operator==(const ParamSpace& other) const {
  if (dimension() != other.dimension()) return false;
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (!(spec(i) == other.spec(i))) return false;
  }
  return true;
}

std::vector<double> enumerate_valid(const ParamSpec& spec) {
  if (!spec.is_discrete()) {
    throw std::invalid_argument("parameter '" + spec.name + "' is continuous");
  }
  if (spec.is_value_set() || spec.grid) {
    ParamAxis axis(spec);
    return axis.valid_values();
  }
  ParamSpec checked = spec;
  validate(checked);
  std::vector<double> out;
  for (double k = std::ceil(checked.lower); k <= std::floor(checked.upper); k += 1.0) {
    out.push_back(k);
  }
  return out;
}

}  // namespace hola
