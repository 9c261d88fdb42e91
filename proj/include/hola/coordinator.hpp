#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hola/search.hpp"

namespace hola {

/// A simulation: hyper-parameters in, named objective values out.
using ObjectiveFn = std::function<ObjectiveMap(const ParamMap&)>;

struct TuneRequest {
  ObjectiveFn func;
  Json params_config;
  Json objectives_config;
  std::size_t num_runs = 100;
  /// Worker count; -1 uses every available processor.
  int n_jobs = 1;
  std::uint64_t seed = 0;
  /// Search settings; `intended_runs` and `seed` are taken from this request.
  SearchOptions search;
  /// Total failed evaluations allowed, as a multiple of num_runs.
  std::size_t failure_factor = 10;
};

/// Owns a SearchState and runs workers against it.
///
/// All access to the state goes through one mutex; evaluation of the
/// objective happens outside it.
class Tuner {
 public:
  Tuner(SearchState state, ObjectiveFn func, std::size_t num_runs, int n_jobs,
        std::size_t failure_factor = 10);

  /// Runs workers until num_runs simulations completed or the failure budget
  /// is spent. Returns the number of completed simulations in this call.
  std::size_t run();

  std::size_t completed() const;
  std::size_t failures() const;
  std::optional<std::string> last_error() const;
  int workers() const { return n_jobs_; }

  ParamMap get_best_params() const;
  std::pair<ObjectiveMap, double> get_best_scores() const;
  std::vector<Trial> leaderboard(std::size_t top) const;
  std::size_t size() const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  /// Serialized read access to the state.
  template <typename Fn>
  decltype(auto) inspect(Fn&& fn) const {
    std::lock_guard lock(sync_->mutex);
    return std::forward<Fn>(fn)(static_cast<const SearchState&>(sync_->state));
  }

 private:
  struct Shared {
    explicit Shared(SearchState s) : state(std::move(s)) {}
    mutable std::mutex mutex;
    std::condition_variable cv;
    SearchState state;
    std::size_t completed = 0;
    std::size_t in_flight = 0;
    std::size_t failures = 0;
    std::optional<std::string> last_error;
  };

  void worker_loop();

  std::unique_ptr<Shared> sync_;
  ObjectiveFn func_;
  std::size_t num_runs_;
  int n_jobs_;
  std::size_t failure_budget_;
};

/// Parses the configs, then runs num_runs simulations on n_jobs workers.
/// Config errors propagate as ConfigError.
Tuner tune(const TuneRequest& request);
/// Resumes from a restored state (e.g. from load_leaderboard).
Tuner tune(const TuneRequest& request, SearchState initial);

int resolve_jobs(int n_jobs);

/// hola_results.csv: header = parameter names then objective names (config
/// order), one row per trial in id order, shortest round-trip numbers.
void save_leaderboard(const SearchState& state, std::ostream& out);
/// Atomic: writes a sibling temporary file and renames it over `path`.
void save_leaderboard(const SearchState& state, const std::filesystem::path& path);

/// Rebuilds a state from a saved leaderboard; costs are recomputed from
/// `objectives`. Rows whose parameters fall outside the space are skipped and
/// logged. Unknown or missing columns and malformed numbers throw.
SearchState load_leaderboard(std::istream& in, ParamSpace space, ObjectiveSet objectives,
                             SearchOptions options = {});
SearchState load_leaderboard(const std::filesystem::path& path, ParamSpace space,
                             ObjectiveSet objectives, SearchOptions options = {});

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace hola
