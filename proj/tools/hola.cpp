#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>

#include "hola/bench.hpp"
#include "hola/server.hpp"

namespace {

hola::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::vector<std::string> all_benchmarks() {
  std::vector<std::string> names;
  for (const auto& fn : hola::bench::benchmark_suite()) names.push_back(fn.name);
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HOLA hyper-parameter optimizer"};
  app.require_subcommand(1);

  hola::ServerConfig serve_config;
  auto* serve = app.add_subcommand("serve", "Serve an optimization session over HTTP");
  serve->add_option("directory", serve_config.directory,
                    "Directory holding hola_params.json and hola_objectives.json")
      ->required()
      ->check(CLI::ExistingDirectory);
  serve->add_option("--port", serve_config.port, "TCP port")->capture_default_str();
  serve->add_option("--host", serve_config.host, "Bind address")->capture_default_str();
  serve->add_option("--seed", serve_config.seed, "Sampler seed")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Benchmark harness");
  bench->require_subcommand(1);

  hola::bench::ExperimentSpec spec;
  spec.optimizers.assign(std::begin(hola::bench::kOptimizers), std::end(hola::bench::kOptimizers));
  spec.budgets = {25, 50, 100, 200};
  std::string results_path = "results.csv";
  bool serial = false;
  auto* run = bench->add_subcommand("run", "Run optimizers on the test functions");
  run->add_option("--optimizers", spec.optimizers, "Optimizers to run");
  run->add_option("--benchmarks", spec.benchmarks, "Test functions (default: all)");
  run->add_option("--budgets", spec.budgets, "Evaluation budgets");
  run->add_option("--repeats", spec.repeats, "Repeats per cell")->capture_default_str();
  run->add_option("--seed", spec.seed, "Base seed")->capture_default_str();
  run->add_option("--out", results_path, "Per-run results CSV")->capture_default_str();
  run->add_flag("--serial", serial, "Disable OpenMP across runs");

  std::string aggregate_in;
  std::string summary_path = "summary.csv";
  auto* aggregate = bench->add_subcommand("aggregate", "Normalized mean-of-means per optimizer");
  aggregate->add_option("results", aggregate_in, "Per-run results CSV")->required();
  aggregate->add_option("--out", summary_path, "Summary CSV (- for stdout)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      hola::Server server(serve_config);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      spdlog::info("serving {} on {}:{} ({} trials restored)", serve_config.directory.string(),
                   serve_config.host, serve_config.port, server.size());
      const bool ok = server.listen();
      g_server = nullptr;
      if (!ok) {
        spdlog::error("could not listen on {}:{}", serve_config.host, serve_config.port);
        return 1;
      }
      return 0;
    }
    if (*run) {
      if (spec.benchmarks.empty()) spec.benchmarks = all_benchmarks();
      spec.parallel = !serial;
      const auto records = hola::bench::run_experiment(spec);
      std::ofstream out(results_path);
      if (!out) throw std::runtime_error("cannot open " + results_path);
      hola::bench::write_records_csv(records, out);
      spdlog::info("wrote {} runs to {}", records.size(), results_path);
      return 0;
    }
    if (*aggregate) {
      std::ifstream in(aggregate_in);
      if (!in) throw std::runtime_error("cannot open " + aggregate_in);
      const auto summary = hola::bench::aggregate_normalized(hola::bench::read_records_csv(in));
      if (summary_path == "-") {
        hola::bench::write_summary_csv(summary, std::cout);
      } else {
        std::ofstream out(summary_path);
        if (!out) throw std::runtime_error("cannot open " + summary_path);
        hola::bench::write_summary_csv(summary, out);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
