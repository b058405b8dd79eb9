// Command-line driver: alerts in, attack graphs and reports out.

#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sage/pipeline.hpp"

#ifndef SAGE_DEFAULT_DATA_DIR
#define SAGE_DEFAULT_DATA_DIR "data"
#endif

int main(int argc, char** argv) {
  CLI::App app{"sage: extract attack graphs from intrusion alerts"};

  sage::PipelineConfig cfg;
  std::vector<std::string> alerts;
  std::string format = "eve-json";
  std::string sig_map = std::string(SAGE_DEFAULT_DATA_DIR) + "/signature_rules.tsv";
  std::string port_map = std::string(SAGE_DEFAULT_DATA_DIR) + "/service-names-port-numbers.csv";
  std::string out_dir = "sage-out";
  std::string stop_after = "stats";
  bool serial = false;

  app.add_option("--alerts", alerts, "alert log files")->required()->check(CLI::ExistingFile);
  app.add_option("--format", format, "input format")
      ->check(CLI::IsMember({"eve-json", "csv"}))
      ->capture_default_str();
  app.add_option("--sig-map", sig_map, "signature rule file (PATTERN<TAB>STAGE)")->capture_default_str();
  app.add_option("--port-map", port_map, "IANA service-names CSV")->capture_default_str();
  app.add_option("--t", cfg.t, "duplicate-alert window in seconds")->capture_default_str();
  app.add_option("--w", cfg.w, "episode gap in seconds")->capture_default_str();
  app.add_option("--symbol-count", cfg.learn.symbol_count, "minimum outcome frequency in merge tests")
      ->capture_default_str();
  app.add_option("--state-count", cfg.learn.state_count, "minimum state occurrence for binding tests")
      ->capture_default_str();
  app.add_option("--sink-count", cfg.learn.sink_count, "states seen fewer times become sinks")
      ->capture_default_str();
  app.add_option("--alpha", cfg.learn.alpha, "Hoeffding significance level")->capture_default_str();
  app.add_option("--split", cfg.split, "training fraction for the perplexity report")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "split shuffle seed")->capture_default_str();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--stop-after", stop_after, "last stage to run")
      ->check(CLI::IsMember({"ingest", "episodes", "learn", "graphs", "stats"}))
      ->capture_default_str();
  app.add_flag("--serial", serial, "use the serial reference kernels");

  CLI11_PARSE(app, argc, argv);

  cfg.alerts.assign(alerts.begin(), alerts.end());
  cfg.format = *sage::parse_format(format);
  cfg.sig_map = sig_map;
  cfg.port_map = port_map;
  cfg.out_dir = out_dir;
  cfg.stop_after = *sage::parse_stage_name(stop_after);
  cfg.exec = serial ? sage::Execution::serial : sage::Execution::parallel;

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "sage: invalid configuration: " << e.what() << '\n';
    return 2;
  }

  try {
    const auto run = sage::run_pipeline(cfg);
    std::cout << "alerts: " << run.mapped.size() << " mapped, " << run.filtered.size()
              << " after filtering (" << run.parse_stats.skipped << " malformed records skipped)\n";
    if (run.completed >= sage::Stage::episodes) {
      std::cout << "sequences: " << run.sequences.size() << " ES, " << run.subsequences.size()
                << " ESS\n";
    }
    if (run.completed >= sage::Stage::learn) {
      std::cout << "model: " << run.model.size() << " states\n";
    }
    if (run.completed >= sage::Stage::graphs) {
      std::cout << "attack graphs: " << run.graphs.size() << " written to " << out_dir << "/graphs\n";
    }
  } catch (const sage::StageError& e) {
    std::cerr << "sage: stage failed: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
