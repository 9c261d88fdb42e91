#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hola/lowdisc.hpp"
#include "hola/mixture.hpp"
#include "hola/param_space.hpp"
#include "hola/scalarizer.hpp"

namespace hola {

/// One completed simulation.
struct Trial {
  std::uint64_t id = 0;
  std::vector<double> x;  // raw parameters, canonical order
  std::vector<double> f;  // objective values, canonical order
  double cost = kInfinity;
  std::chrono::system_clock::time_point timestamp;

  bool feasible() const { return cost < kInfinity; }
};

enum class MixtureSampling { pseudo_random, gauss_sobol };

struct SearchOptions {
  double elite_fraction = 0.2;
  /// Intended number of simulations; unknown in server mode.
  std::optional<std::size_t> intended_runs;
  int max_components = 3;
  std::uint64_t seed = 0;
  MixtureSampling sampling = MixtureSampling::pseudo_random;
  /// Probability of a Sobol exploration draw after the threshold.
  double explore_probability = 0.0;
  /// Trade-off mode: names of the 2 or 3 objectives to explore.
  std::vector<std::string> tradeoff;
  bool parallel = true;
};

enum class SuggestionSource { sobol, mixture };

struct Suggestion {
  std::vector<double> x;
  SuggestionSource source = SuggestionSource::sobol;
};

/// Iterated non-dominated sorting of `values` (rows = trials) where column k
/// has sense `senses[k]`. Returns 1-based levels. 2 or 3 objectives.
std::vector<int> pareto_levels(const std::vector<std::vector<double>>& values,
                               std::span<const Sense> senses, bool parallel = true);

/// Exploration threshold min{floor(S/5), 50 + 2n}, or 50 + 2n when S is unknown.
std::size_t exploration_threshold(std::optional<std::size_t> intended_runs, std::size_t dimension);

/// The optimizer state: trial list, leaderboard, elite set and sampling model.
///
/// Not synchronized; wrap it in a GuardedSearch to share between threads.
class SearchState {
 public:
  SearchState(ParamSpace space, ObjectiveSet objectives, SearchOptions options = {});

  const ParamSpace& space() const { return space_; }
  const ObjectiveSet& objectives() const { return objectives_; }
  const SearchOptions& options() const { return options_; }
  bool tradeoff_mode() const { return !tradeoff_.empty(); }
  /// Indices of the trade-off objectives (empty in scalarized mode).
  const std::vector<std::size_t>& tradeoff_objectives() const { return tradeoff_; }

  std::size_t size() const { return trials_.size(); }
  const std::vector<Trial>& trials() const { return trials_; }
  const Trial& trial(std::uint64_t id) const;
  std::size_t feasible_count() const;

  /// Records a completed simulation. `x` must be a member of the search space
  /// (std::out_of_range otherwise); `f` must have one value per objective.
  std::uint64_t add_trial(std::vector<double> x, std::vector<double> f);
  std::uint64_t add_trial(const ParamMap& x, const ObjectiveMap& f);

  /// Replaces the scalarization (same objective names) and recomputes costs.
  void rescore(ObjectiveSet objectives);

  std::size_t threshold() const { return threshold_; }
  std::size_t elite_size() const;
  /// Current elite trial ids, best first.
  const std::vector<std::uint64_t>& elite_ids() const { return elite_ids_; }
  std::vector<Trial> elite_set() const;
  const std::optional<MixtureModel>& mixture() const { return mixture_; }
  std::size_t refit_count() const { return refits_; }

  /// Pareto levels of the feasible trials in trade-off mode (0 = infeasible).
  std::vector<int> levels() const;

  Suggestion suggest();

  std::vector<Trial> leaderboard(std::size_t top) const;
  std::vector<Trial> leaderboard() const { return leaderboard(trials_.size()); }
  const Trial& best() const;
  std::vector<double> best_params() const { return best().x; }
  std::pair<std::vector<double>, double> best_scores() const;

  /// Sobol stream index; restored states resume at index K.
  std::uint64_t sobol_index() const { return sobol_.index(); }
  void seek_sobol(std::uint64_t index) { sobol_.seek(index); }

 private:
  std::vector<std::size_t> ranking() const;
  std::vector<std::uint64_t> select_elite();
  void refresh();

  ParamSpace space_;
  ObjectiveSet objectives_;
  SearchOptions options_;
  std::vector<std::size_t> tradeoff_;
  std::size_t threshold_;

  std::vector<Trial> trials_;
  std::vector<int> levels_;
  std::vector<std::uint64_t> elite_ids_;
  std::vector<std::uint64_t> fitted_ids_;
  std::optional<MixtureModel> mixture_;
  std::size_t refits_ = 0;

  SobolStream sobol_;
  std::optional<SobolStream> gauss_stream_;
  std::mt19937_64 rng_;
};

/// Single serialized access point to a SearchState.
class GuardedSearch {
 public:
  explicit GuardedSearch(SearchState state) : state_(std::move(state)) {}

  template <typename Fn>
  decltype(auto) with(Fn&& fn) {
    std::lock_guard lock(mutex_);
    return std::forward<Fn>(fn)(state_);
  }

 private:
  std::mutex mutex_;
  SearchState state_;
};

}  // namespace hola
