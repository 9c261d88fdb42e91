#include "hola/coordinator.hpp"

#include <spdlog/spdlog.h>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "csv.hpp"

namespace hola {

int resolve_jobs(int n_jobs) {
  if (n_jobs == -1) return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (n_jobs < 1) throw std::invalid_argument("n_jobs must be positive or -1");
  return n_jobs;
}

// ---------------------------------------------------------------------------
// Tuner

Tuner::Tuner(SearchState state, ObjectiveFn func, std::size_t num_runs, int n_jobs,
             std::size_t failure_factor)
    : sync_(std::make_unique<Shared>(std::move(state))),
      func_(std::move(func)),
      num_runs_(num_runs),
      n_jobs_(resolve_jobs(n_jobs)),
      failure_budget_(failure_factor * num_runs) {
  if (num_runs == 0) throw std::invalid_argument("num_runs must be at least 1");
  if (!func_) throw std::invalid_argument("no objective function given");
}

std::size_t Tuner::run() {
  const std::size_t before = completed();
  if (n_jobs_ == 1) {
    worker_loop();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_jobs_; ++i) pool.emplace_back([this] { worker_loop(); });
  }
  return completed() - before;
}

void Tuner::worker_loop() {
  auto& s = *sync_;
  for (;;) {
    std::vector<double> x;
    {
      std::unique_lock lock(s.mutex);
      s.cv.wait(lock, [&] {
        return s.completed >= num_runs_ || s.failures >= failure_budget_ ||
               s.completed + s.in_flight < num_runs_;
      });
      if (s.completed >= num_runs_ || s.failures >= failure_budget_) return;
      ++s.in_flight;
      x = s.state.suggest().x;
    }

    std::optional<ObjectiveMap> result;
    std::string error;
    try {
      result = func_(s.state.space().map_from(x));
    } catch (const std::exception& e) {
      error = e.what();
    } catch (...) {
      error = "unknown exception";
    }

    std::lock_guard lock(s.mutex);
    --s.in_flight;
    if (result) {
      try {
        s.state.add_trial(std::move(x), s.state.objectives().vector_from(*result));
        ++s.completed;
      } catch (const std::exception& e) {
        error = e.what();
        result.reset();
      }
    }
    if (!result) {
      ++s.failures;
      s.last_error = error;
      spdlog::warn("evaluation failed ({} so far): {}", s.failures, error);
      if (s.failures >= failure_budget_) {
        spdlog::error("failure budget of {} evaluations exhausted", failure_budget_);
      }
    }
    s.cv.notify_all();
  }
}

std::size_t Tuner::completed() const {
  std::lock_guard lock(sync_->mutex);
  return sync_->completed;
}

std::size_t Tuner::failures() const {
  std::lock_guard lock(sync_->mutex);
  return sync_->failures;
}

std::optional<std::string> Tuner::last_error() const {
  std::lock_guard lock(sync_->mutex);
  return sync_->last_error;
}

ParamMap Tuner::get_best_params() const {
  return inspect([](const SearchState& s) { return s.space().map_from(s.best_params()); });
}

std::pair<ObjectiveMap, double> Tuner::get_best_scores() const {
  return inspect([](const SearchState& s) {
    auto [f, cost] = s.best_scores();
    return std::make_pair(s.objectives().map_from(f), cost);
  });
}

std::vector<Trial> Tuner::leaderboard(std::size_t top) const {
  return inspect([top](const SearchState& s) { return s.leaderboard(top); });
}

std::size_t Tuner::size() const {
  return inspect([](const SearchState& s) { return s.size(); });
}

void Tuner::save(std::ostream& out) const {
  inspect([&out](const SearchState& s) { save_leaderboard(s, out); });
}

void Tuner::save(const std::filesystem::path& path) const {
  inspect([&path](const SearchState& s) { save_leaderboard(s, path); });
}

namespace {

SearchState make_state(const TuneRequest& request) {
  SearchOptions options = request.search;
  options.intended_runs = request.num_runs;
  options.seed = request.seed;
  return SearchState(ParamSpace::from_json(request.params_config),
                     ObjectiveSet::from_json(request.objectives_config), options);
}

}  // namespace

Tuner tune(const TuneRequest& request) { return tune(request, make_state(request)); }

Tuner tune(const TuneRequest& request, SearchState initial) {
  Tuner tuner(std::move(initial), request.func, request.num_runs, request.n_jobs,
              request.failure_factor);
  tuner.run();
  return tuner;
}

// ---------------------------------------------------------------------------
// Persistence

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf.data(), ptr);
}

void save_leaderboard(const SearchState& state, std::ostream& out) {
  std::vector<std::string> header = state.space().names();
  for (const auto& n : state.objectives().names()) header.push_back(n);
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << detail::csv_field(header[i]);
  }
  out << '\n';
  for (const auto& t : state.trials()) {
    bool first = true;
    for (double v : t.x) {
      out << (first ? "" : ",") << format_number(v);
      first = false;
    }
    for (double v : t.f) out << ',' << format_number(v);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed to write leaderboard");
}

void save_leaderboard(const SearchState& state, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    save_leaderboard(state, out);
    out.flush();
    if (!out) throw std::runtime_error("failed to write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SearchState load_leaderboard(std::istream& in, ParamSpace space, ObjectiveSet objectives,
                             SearchOptions options) {
  SearchState state(std::move(space), std::move(objectives), std::move(options));
  std::string line;
  if (!std::getline(in, line) || line.find_first_not_of(" \t\r") == std::string::npos) {
    // A missing header is an empty leaderboard.
    return state;
  }
  const auto header = detail::csv_split(line);
  const std::size_t n = state.space().dimension();
  const std::size_t k = state.objectives().size();
  // column -> (is_param, index)
  std::vector<std::pair<bool, std::size_t>> columns;
  std::vector<bool> seen_param(n, false), seen_obj(k, false);
  for (const auto& name : header) {
    if (auto p = state.space().index_of(name)) {
      if (seen_param[*p]) throw ConfigError("duplicate column '" + name + "'");
      seen_param[*p] = true;
      columns.emplace_back(true, *p);
    } else if (auto o = state.objectives().index_of(name)) {
      if (seen_obj[*o]) throw ConfigError("duplicate column '" + name + "'");
      seen_obj[*o] = true;
      columns.emplace_back(false, *o);
    } else {
      throw ConfigError("unknown column '" + name + "' in leaderboard");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen_param[i]) throw ConfigError("leaderboard lacks column '" + state.space().spec(i).name + "'");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!seen_obj[i]) throw ConfigError("leaderboard lacks column '" + state.objectives()[i].name + "'");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::csv_split(line);
    if (fields.size() != columns.size()) {
      throw std::runtime_error("leaderboard line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    std::vector<double> x(n), f(k);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      auto value = detail::parse_double(fields[c]);
      if (!value) {
        throw std::runtime_error("leaderboard line " + std::to_string(line_no) +
                                 ": malformed number '" + fields[c] + "'");
      }
      (columns[c].first ? x : f)[columns[c].second] = *value;
    }
    if (!state.space().contains(x)) {
      spdlog::warn("leaderboard line {}: parameters outside the search space, row skipped", line_no);
      continue;
    }
    state.add_trial(std::move(x), std::move(f));
  }
  state.seek_sobol(state.size());
  return state;
}

SearchState load_leaderboard(const std::filesystem::path& path, ParamSpace space,
                             ObjectiveSet objectives, SearchOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_leaderboard(in, std::move(space), std::move(objectives), std::move(options));
}

}  // namespace hola
