#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hola/search.hpp"

namespace httplib {
class Server;
}

namespace hola {

inline constexpr const char* kParamsFile = "hola_params.json";
inline constexpr const char* kObjectivesFile = "hola_objectives.json";
inline constexpr const char* kResultsFile = "hola_results.csv";
inline constexpr int kDefaultPort = 8675;

struct ServerConfig {
  std::filesystem::path directory;
  int port = kDefaultPort;
  std::string host = "localhost";
  std::uint64_t seed = 0;
};

/// hola_objectives.json is either the plain objectives map or a wrapper
/// `{"objectives": {...}, "tradeoff": ["a", "b"]}` selecting trade-off mode.
struct ObjectivesDocument {
  Json objectives;
  std::vector<std::string> tradeoff;

  static ObjectivesDocument parse(const Json& doc);
  Json to_json() const;
};

/// HTTP front end of one optimization session.
///
/// Routes: GET /, GET|POST /report_request, GET /param, GET /experiment,
/// PUT /objectives, GET /leaderboard, GET /pareto?objectives=a,b[,c].
/// Every accepted report rewrites hola_results.csv before it is acknowledged.
class Server {
 public:
  /// Loads the configuration files from `config.directory` and restores
  /// hola_results.csv when present. Throws ConfigError naming the bad file.
  explicit Server(ServerConfig config);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and serves until stop(). Returns false when the port is unusable.
  bool listen();
  /// Binds to an ephemeral port and returns it; follow with listen_after_bind().
  int bind_to_any_port();
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

  const ServerConfig& config() const { return config_; }
  std::size_t size() const;

  template <typename Fn>
  decltype(auto) inspect(Fn&& fn) const {
    std::lock_guard lock(mutex_);
    return std::forward<Fn>(fn)(static_cast<const SearchState&>(*state_));
  }

 private:
  void install_routes();
  void persist_results() const;
  void persist_objectives() const;
  Json sample_document();
  Json trial_document(const Trial& trial) const;

  ServerConfig config_;
  Json params_doc_;
  ObjectivesDocument objectives_doc_;
  mutable std::mutex mutex_;
  std::unique_ptr<SearchState> state_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace hola
