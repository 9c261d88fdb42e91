#include "hola/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hola {

std::vector<int> pareto_levels(const std::vector<std::vector<double>>& values,
                               std::span<const Sense> senses, bool parallel) {
  if (senses.size() < 2 || senses.size() > 3) {
    throw std::invalid_argument("Pareto levels need 2 or 3 objectives");
  }
  const auto m = static_cast<Eigen::Index>(senses.size());
  Eigen::MatrixXd costs(static_cast<Eigen::Index>(values.size()), m);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != senses.size()) {
      throw std::invalid_argument("Pareto levels: row has the wrong number of objectives");
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      const double v = values[i][static_cast<std::size_t>(k)];
      costs(static_cast<Eigen::Index>(i), k) = senses[k] == Sense::minimize ? v : -v;
    }
  }
  return parallel ? kernels::pareto_levels_parallel(costs) : kernels::pareto_levels_serial(costs);
}

std::size_t exploration_threshold(std::optional<std::size_t> intended_runs, std::size_t dimension) {
  const std::size_t fixed = 50 + 2 * dimension;
  if (!intended_runs) return fixed;
  return std::min(*intended_runs / 5, fixed);
}

SearchState::SearchState(ParamSpace space, ObjectiveSet objectives, SearchOptions options)
    : space_(std::move(space)),
      objectives_(std::move(objectives)),
      options_(std::move(options)),
      threshold_(exploration_threshold(options_.intended_runs, space_.dimension())),
      sobol_(std::max<std::size_t>(space_.dimension(), 1)),
      rng_(options_.seed) {
  if (space_.dimension() == 0) throw ConfigError("search space has no parameters");
  if (objectives_.empty()) throw ConfigError("no objectives configured");
  if (!(options_.elite_fraction > 0.0 && options_.elite_fraction <= 1.0)) {
    throw ConfigError("elite fraction must lie in (0, 1]");
  }
  if (!(options_.explore_probability >= 0.0 && options_.explore_probability <= 1.0)) {
    throw ConfigError("explore probability must lie in [0, 1]");
  }
  if (!options_.tradeoff.empty()) {
    if (options_.tradeoff.size() < 2 || options_.tradeoff.size() > 3) {
      throw ConfigError("trade-off mode needs 2 or 3 objectives");
    }
    std::set<std::size_t> seen;
    for (const auto& name : options_.tradeoff) {
      auto idx = objectives_.index_of(name);
      if (!idx) throw ConfigError("trade-off objective '" + name + "' is not configured");
      if (!seen.insert(*idx).second) throw ConfigError("trade-off objective '" + name + "' repeated");
      tradeoff_.push_back(*idx);
    }
  }
  if (options_.sampling == MixtureSampling::gauss_sobol) gauss_stream_.emplace(space_.dimension());
}

const Trial& SearchState::trial(std::uint64_t id) const {
  if (id >= trials_.size()) throw std::out_of_range("no trial with id " + std::to_string(id));
  return trials_[id];
}

std::size_t SearchState::feasible_count() const {
  return static_cast<std::size_t>(
      std::count_if(trials_.begin(), trials_.end(), [](const Trial& t) { return t.feasible(); }));
}

std::uint64_t SearchState::add_trial(std::vector<double> x, std::vector<double> f) {
  if (f.size() != objectives_.size()) {
    throw std::invalid_argument("trial has " + std::to_string(f.size()) +
                                " objective values, expected " + std::to_string(objectives_.size()));
  }
  if (x.size() != space_.dimension()) {
    throw std::invalid_argument("trial has " + std::to_string(x.size()) +
                                " parameters, expected " + std::to_string(space_.dimension()));
  }
  if (!space_.contains(x)) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::isnan(x[i])) throw std::out_of_range("parameter value is NaN");
      x[i] = std::clamp(x[i], space_.spec(i).lower, space_.spec(i).upper);
    }
    x = space_.to_raw(space_.standardize(x));
  }
  Trial t;
  t.id = trials_.size();
  t.x = std::move(x);
  t.f = std::move(f);
  t.cost = objectives_.scalarize(t.f);
  t.timestamp = std::chrono::system_clock::now();
  trials_.push_back(std::move(t));
  refresh();
  return trials_.back().id;
}

std::uint64_t SearchState::add_trial(const ParamMap& x, const ObjectiveMap& f) {
  return add_trial(space_.vector_from(x), objectives_.vector_from(f));
}

void SearchState::rescore(ObjectiveSet objectives) {
  if (!objectives_.same_names(objectives)) {
    throw std::invalid_argument("rescore: objective names differ from the configured ones");
  }
  objectives_ = std::move(objectives);
  for (auto& t : trials_) t.cost = objectives_.scalarize(t.f);
  refresh();
}

std::size_t SearchState::elite_size() const {
  const std::size_t feasible = feasible_count();
  if (feasible == 0) return 0;
  const auto r = static_cast<std::size_t>(
      std::floor(options_.elite_fraction * static_cast<double>(feasible) + 1e-9));
  return std::min(feasible, std::max<std::size_t>(1, r));
}

std::vector<int> SearchState::levels() const { return levels_; }

std::vector<std::size_t> SearchState::ranking() const {
  std::vector<std::size_t> order(trials_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (tradeoff_mode()) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const int la = levels_[a] == 0 ? std::numeric_limits<int>::max() : levels_[a];
      const int lb = levels_[b] == 0 ? std::numeric_limits<int>::max() : levels_[b];
      return la < lb;
    });
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return trials_[a].cost < trials_[b].cost; });
  }
  return order;
}

std::vector<std::uint64_t> SearchState::select_elite() {
  const std::size_t r = elite_size();
  std::vector<std::uint64_t> elite;
  if (r == 0) return elite;
  const auto order = ranking();
  if (!tradeoff_mode()) {
    for (std::size_t i = 0; i < r; ++i) elite.push_back(trials_[order[i]].id);
    return elite;
  }
  // Fill level by level; an overflowing level contributes a uniform random
  // subset of its members.
  std::size_t pos = 0;
  while (elite.size() < r && pos < order.size() && levels_[order[pos]] != 0) {
    const int level = levels_[order[pos]];
    std::vector<std::uint64_t> members;
    for (; pos < order.size() && levels_[order[pos]] == level; ++pos) {
      members.push_back(trials_[order[pos]].id);
    }
    const std::size_t room = r - elite.size();
    if (members.size() > room) {
      for (std::size_t i = 0; i < room; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, members.size() - 1);
        std::swap(members[i], members[pick(rng_)]);
      }
      members.resize(room);
    }
    elite.insert(elite.end(), members.begin(), members.end());
  }
  return elite;
}

void SearchState::refresh() {
  if (tradeoff_mode()) {
    std::vector<std::vector<double>> values;
    std::vector<std::size_t> feasible;
    std::vector<Sense> senses;
    for (auto k : tradeoff_) senses.push_back(objectives_[k].sense());
    for (std::size_t i = 0; i < trials_.size(); ++i) {
      if (!trials_[i].feasible()) continue;
      feasible.push_back(i);
      std::vector<double> row;
      for (auto k : tradeoff_) row.push_back(trials_[i].f[k]);
      values.push_back(std::move(row));
    }
    levels_.assign(trials_.size(), 0);
    const auto lv = pareto_levels(values, senses, options_.parallel);
    for (std::size_t j = 0; j < feasible.size(); ++j) levels_[feasible[j]] = lv[j];
  }

  elite_ids_ = select_elite();

  const std::size_t feasible = feasible_count();
  if (trials_.size() < threshold_ || feasible < 2) {
    mixture_.reset();
    fitted_ids_.clear();
    return;
  }
  std::vector<std::uint64_t> ids = elite_ids_;
  if (ids.size() < 2) {
    // A single elite point cannot be modelled; borrow the next best feasible trial.
    for (auto i : ranking()) {
      if (ids.size() >= 2) break;
      if (trials_[i].feasible() && std::find(ids.begin(), ids.end(), trials_[i].id) == ids.end()) {
        ids.push_back(trials_[i].id);
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  if (mixture_ && ids == fitted_ids_) return;

  Eigen::MatrixXd points(static_cast<Eigen::Index>(space_.dimension()),
                         static_cast<Eigen::Index>(ids.size()));
  for (std::size_t j = 0; j < ids.size(); ++j) {
    const auto z = space_.standardize(trials_[ids[j]].x);
    points.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
  }
  FitOptions fit;
  fit.max_components = options_.max_components;
  fit.seed = options_.seed + refits_;
  fit.parallel = options_.parallel;
  mixture_ = fit_mixture(points, fit);
  fitted_ids_ = std::move(ids);
  ++refits_;
}

std::vector<Trial> SearchState::elite_set() const {
  std::vector<Trial> out;
  for (auto id : elite_ids_) out.push_back(trials_[id]);
  return out;
}

Suggestion SearchState::suggest() {
  bool explore = trials_.size() < threshold_ || !mixture_;
  if (!explore && options_.explore_probability > 0.0) {
    explore = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < options_.explore_probability;
  }
  Suggestion s;
  std::vector<double> z;
  if (explore) {
    z = sobol_.next();
    s.source = SuggestionSource::sobol;
  } else {
    const Eigen::VectorXd draw =
        gauss_stream_ ? mixture_->sample(rng_, *gauss_stream_) : mixture_->sample(rng_);
    z.assign(draw.data(), draw.data() + draw.size());
    s.source = SuggestionSource::mixture;
  }
  s.x = space_.to_raw(z);
  return s;
}

std::vector<Trial> SearchState::leaderboard(std::size_t top) const {
  const auto order = ranking();
  std::vector<Trial> out;
  for (std::size_t i = 0; i < std::min(top, order.size()); ++i) out.push_back(trials_[order[i]]);
  return out;
}

const Trial& SearchState::best() const {
  if (trials_.empty()) throw std::out_of_range("leaderboard is empty");
  return trials_[ranking().front()];
}

std::pair<std::vector<double>, double> SearchState::best_scores() const {
  const Trial& t = best();
  return {t.f, t.cost};
}

}  // namespace hola
