#include "hola/server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hola/coordinator.hpp"

namespace hola {
namespace {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing configuration file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("failed to write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string html_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string html_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return format_number(v);
}

void reply_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, Json{{"error", message}}, status);
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

SearchState load_state(const ServerConfig& config, const Json& params_doc,
                       const ObjectivesDocument& objectives_doc) {
  ParamSpace space;
  try {
    space = ParamSpace::from_json(params_doc);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(kParamsFile) + ": " + e.what());
  }
  ObjectiveSet objectives;
  try {
    objectives = ObjectiveSet::from_json(objectives_doc.objectives);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(kObjectivesFile) + ": " + e.what());
  }
  SearchOptions options;
  options.seed = config.seed;
  options.tradeoff = objectives_doc.tradeoff;
  const auto results = config.directory / kResultsFile;
  if (std::filesystem::exists(results)) {
    auto state = load_leaderboard(results, std::move(space), std::move(objectives), options);
    spdlog::info("restored {} trials from {}", state.size(), results.string());
    return state;
  }
  return SearchState(std::move(space), std::move(objectives), options);
}

}  // namespace

// ---------------------------------------------------------------------------
// ObjectivesDocument

ObjectivesDocument ObjectivesDocument::parse(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("objectives document must be a key-value object");
  ObjectivesDocument out;
  const auto inner = doc.find("objectives");
  const bool wrapped = doc.contains("tradeoff") ||
                       (inner != doc.end() && inner->is_object() && !inner->contains("target"));
  if (!wrapped) {
    out.objectives = doc;
    return out;
  }
  if (inner == doc.end()) throw ConfigError("objectives document lacks 'objectives'");
  out.objectives = *inner;
  if (auto t = doc.find("tradeoff"); t != doc.end() && !t->is_null()) {
    if (!t->is_array()) throw ConfigError("'tradeoff' must be a list of objective names");
    for (const auto& name : *t) {
      if (!name.is_string()) throw ConfigError("'tradeoff' must list objective names");
      out.tradeoff.push_back(name.get<std::string>());
    }
  }
  return out;
}

Json ObjectivesDocument::to_json() const {
  if (tradeoff.empty()) return objectives;
  return Json{{"objectives", objectives}, {"tradeoff", tradeoff}};
}

// ---------------------------------------------------------------------------
// Server

Server::Server(ServerConfig config) : config_(std::move(config)) {
  params_doc_ = read_json_file(config_.directory / kParamsFile);
  try {
    objectives_doc_ = ObjectivesDocument::parse(read_json_file(config_.directory / kObjectivesFile));
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    throw ConfigError(what.find(kObjectivesFile) == std::string::npos
                          ? std::string(kObjectivesFile) + ": " + what
                          : what);
  }
  state_ = std::make_unique<SearchState>(load_state(config_, params_doc_, objectives_doc_));
  http_ = std::make_unique<httplib::Server>();
  http_->new_task_queue = [] { return new httplib::ThreadPool(64); };
  install_routes();
}

Server::~Server() { stop(); }

std::size_t Server::size() const {
  std::lock_guard lock(mutex_);
  return state_->size();
}

bool Server::listen() {
  spdlog::info("serving {} on {}:{}", config_.directory.string(), config_.host, config_.port);
  return http_->listen(config_.host, config_.port);
}

int Server::bind_to_any_port() {
  config_.port = http_->bind_to_any_port(config_.host);
  return config_.port;
}

bool Server::listen_after_bind() { return http_->listen_after_bind(); }

void Server::stop() {
  if (http_) http_->stop();
}

void Server::wait_until_ready() const { http_->wait_until_ready(); }

void Server::persist_results() const {
  std::ostringstream out;
  save_leaderboard(*state_, out);
  write_file_atomic(config_.directory / kResultsFile, out.str());
}

void Server::persist_objectives() const {
  write_file_atomic(config_.directory / kObjectivesFile, objectives_doc_.to_json().dump(4) + "\n");
}

Json Server::sample_document() {
  const auto x = state_->suggest().x;
  Json doc = Json::object();
  for (std::size_t i = 0; i < x.size(); ++i) doc[state_->space().spec(i).name] = x[i];
  return doc;
}

Json Server::trial_document(const Trial& t) const {
  Json params = Json::object();
  for (std::size_t i = 0; i < t.x.size(); ++i) params[state_->space().spec(i).name] = t.x[i];
  Json objectives = Json::object();
  for (std::size_t i = 0; i < t.f.size(); ++i) {
    objectives[state_->objectives()[i].name] = std::isfinite(t.f[i]) ? Json(t.f[i]) : Json(nullptr);
  }
  return Json{{"id", t.id},
              {"params", std::move(params)},
              {"objectives", std::move(objectives)},
              {"cost", t.feasible() ? Json(t.cost) : Json(nullptr)},
              {"feasible", t.feasible()}};
}

void Server::install_routes() {
  auto& http = *http_;
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  http.Get("/", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    const auto& space = state_->space();
    const auto& objectives = state_->objectives();
    const bool tradeoff = state_->tradeoff_mode();
    const auto levels = state_->levels();
    std::ostringstream html;
    html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>HOLA leaderboard</title>"
         << "<style>body{font-family:sans-serif}table{border-collapse:collapse}"
         << "td,th{border:1px solid #ccc;padding:2px 8px;text-align:right}"
         << "tr.infeasible{color:#999}</style></head><body>\n"
         << "<h1>Leaderboard</h1>\n<p>" << state_->size() << " simulations</p>\n"
         << "<table id=\"leaderboard\">\n<tr><th>rank</th><th>id</th>";
    for (const auto& n : space.names()) html << "<th>" << html_escape(n) << "</th>";
    for (const auto& n : objectives.names()) html << "<th>" << html_escape(n) << "</th>";
    html << "<th>cost</th>" << (tradeoff ? "<th>level</th>" : "") << "</tr>\n";
    std::size_t rank = 0;
    for (const auto& t : state_->leaderboard()) {
      html << "<tr class=\"" << (t.feasible() ? "trial" : "trial infeasible") << "\"><td>" << ++rank
           << "</td><td>" << t.id << "</td>";
      for (double v : t.x) html << "<td>" << html_number(v) << "</td>";
      for (double v : t.f) html << "<td>" << html_number(v) << "</td>";
      html << "<td>" << html_number(t.cost) << "</td>";
      if (tradeoff) html << "<td>" << (levels[t.id] ? std::to_string(levels[t.id]) : "-") << "</td>";
      html << "</tr>\n";
    }
    html << "</table>\n</body></html>\n";
    res.set_content(html.str(), "text/html");
  });

  http.Get("/report_request", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    reply_json(res, sample_document());
  });

  http.Post("/report_request", [this](const httplib::Request& req, httplib::Response& res) {
    Json body;
    if (req.body.find_first_not_of(" \t\r\n") != std::string::npos) {
      try {
        body = Json::parse(req.body);
      } catch (const Json::parse_error& e) {
        return reply_error(res, 400, std::string("malformed JSON: ") + e.what());
      }
    }
    std::lock_guard lock(mutex_);
    if (body.is_null() || (body.is_object() && body.empty())) {
      return reply_json(res, sample_document());
    }
    if (!body.is_object() || !body.contains("params") || !body.contains("objectives") ||
        !body["params"].is_object() || !body["objectives"].is_object()) {
      return reply_error(res, 400, "report must be {\"params\": {...}, \"objectives\": {...}}");
    }
    ParamMap params;
    for (const auto& [name, value] : body["params"].items()) {
      if (!value.is_number()) return reply_error(res, 400, "parameter '" + name + "' is not a number");
      params[name] = value.get<double>();
    }
    ObjectiveMap objectives;
    for (const auto& [name, value] : body["objectives"].items()) {
      if (!value.is_number()) return reply_error(res, 400, "objective '" + name + "' is not a number");
      objectives[name] = value.get<double>();
    }
    std::vector<double> x, f;
    try {
      x = state_->space().vector_from(params);
      f = state_->objectives().vector_from(objectives);
    } catch (const std::invalid_argument& e) {
      return reply_error(res, 400, e.what());
    }
    if (!state_->space().contains(x)) {
      return reply_error(res, 400, "reported parameters are outside the search space");
    }
    state_->add_trial(std::move(x), std::move(f));
    persist_results();
    reply_json(res, sample_document());
  });

  http.Get("/param", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    if (state_->size() == 0) return reply_error(res, 404, "leaderboard is empty");
    const auto x = state_->best_params();
    Json doc = Json::object();
    for (std::size_t i = 0; i < x.size(); ++i) doc[state_->space().spec(i).name] = x[i];
    reply_json(res, doc);
  });

  http.Get("/experiment", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    Json doc{{"params", params_doc_}, {"objectives", objectives_doc_.objectives}};
    if (!objectives_doc_.tradeoff.empty()) doc["tradeoff"] = objectives_doc_.tradeoff;
    reply_json(res, doc);
  });

  http.Put("/objectives", [this](const httplib::Request& req, httplib::Response& res) {
    ObjectivesDocument doc;
    ObjectiveSet parsed;
    try {
      doc = ObjectivesDocument::parse(Json::parse(req.body));
      parsed = ObjectiveSet::from_json(doc.objectives);
    } catch (const std::exception& e) {
      return reply_error(res, 400, e.what());
    }
    std::lock_guard lock(mutex_);
    if (!parsed.same_names(state_->objectives())) {
      return reply_error(res, 400, "objective names must match the configured objectives");
    }
    state_->rescore(std::move(parsed));
    objectives_doc_.objectives = doc.objectives;
    persist_objectives();
    reply_json(res, Json{{"status", "ok"}, {"objectives", objectives_doc_.objectives}});
  });

  http.Get("/leaderboard", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    std::size_t top = state_->size();
    if (req.has_param("top")) {
      try {
        top = std::stoul(req.get_param_value("top"));
      } catch (const std::exception&) {
        return reply_error(res, 400, "top must be a non-negative integer");
      }
    }
    const bool tradeoff = state_->tradeoff_mode();
    const auto levels = state_->levels();
    Json trials = Json::array();
    for (const auto& t : state_->leaderboard(top)) {
      Json doc = trial_document(t);
      if (tradeoff) doc["level"] = levels[t.id] ? Json(levels[t.id]) : Json(nullptr);
      trials.push_back(std::move(doc));
    }
    reply_json(res, Json{{"mode", tradeoff ? "tradeoff" : "scalarized"},
                         {"params", state_->space().names()},
                         {"objectives", state_->objectives().names()},
                         {"trials", std::move(trials)}});
  });

  http.Get("/pareto", [this](const httplib::Request& req, httplib::Response& res) {
    const auto names = split_names(req.get_param_value("objectives"));
    std::lock_guard lock(mutex_);
    const auto& objectives = state_->objectives();
    if (names.size() < 2 || names.size() > 3) {
      return reply_error(res, 400, "select 2 or 3 objectives, e.g. ?objectives=a,b");
    }
    std::vector<std::size_t> idx;
    std::vector<Sense> senses;
    for (const auto& n : names) {
      auto i = objectives.index_of(n);
      if (!i) return reply_error(res, 400, "unknown objective '" + n + "'");
      if (std::find(idx.begin(), idx.end(), *i) != idx.end()) {
        return reply_error(res, 400, "objective '" + n + "' selected twice");
      }
      idx.push_back(*i);
      senses.push_back(objectives[*i].sense());
    }
    std::vector<const Trial*> feasible;
    std::vector<std::vector<double>> values;
    for (const auto& t : state_->trials()) {
      if (!t.feasible()) continue;
      feasible.push_back(&t);
      std::vector<double> row;
      for (auto i : idx) row.push_back(t.f[i]);
      values.push_back(std::move(row));
    }
    const auto levels = pareto_levels(values, senses);
    std::vector<std::size_t> order(feasible.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
    Json trials = Json::array();
    for (auto i : order) {
      Json doc = trial_document(*feasible[i]);
      doc["level"] = levels[i];
      trials.push_back(std::move(doc));
    }
    reply_json(res, Json{{"objectives", names}, {"trials", std::move(trials)}});
  });
}

}  // namespace hola
