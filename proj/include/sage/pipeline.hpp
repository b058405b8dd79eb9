#ifndef SAGE_PIPELINE_HPP
#define SAGE_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sage/alert_ingest.hpp"
#include "sage/analytics.hpp"
#include "sage/attack_graphs.hpp"
#include "sage/episodes.hpp"
#include "sage/spdfa.hpp"

namespace sage {

enum class Stage { ingest, episodes, learn, graphs, stats };

std::string_view stage_name(Stage stage) noexcept;
std::optional<Stage> parse_stage_name(std::string_view text) noexcept;

struct PipelineConfig {
  std::vector<std::filesystem::path> alerts;
  AlertFormat format = AlertFormat::eve_json;
  std::filesystem::path sig_map;
  std::filesystem::path port_map;
  double t = 1.0;    // duplicate window, seconds
  double w = 150.0;  // episode gap, seconds
  LearnParams learn;
  double split = 0.8;  // training fraction for the perplexity report
  std::uint64_t seed = 42;
  std::filesystem::path out_dir;
  Stage stop_after = Stage::stats;
  Execution exec = Execution::parallel;

  /// Throws std::invalid_argument on t, w, split or alpha out of range.
  void validate() const;
};

class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& what)
      : std::runtime_error(std::string(stage_name(stage)) + ": " + what), stage_(stage) {}
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

struct PerplexityReport {
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  // order: suffix tree, Markov chain, S-PDFA; absent when the set is empty
  std::optional<std::array<double, 3>> train;
  std::optional<std::array<double, 3>> test;
};

/// Deterministic shuffle-and-cut of `n` indices: first part training.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                           double train_fraction,
                                                                           std::uint64_t seed);

PerplexityReport evaluate_perplexity(std::span<const std::vector<Symbol>> corpus, double split,
                                     std::uint64_t seed, const LearnParams& params,
                                     Execution exec = Execution::parallel);

/// Everything the pipeline derives in memory.
struct PipelineRun {
  ParseStats parse_stats;
  std::vector<Alert> mapped;
  std::vector<Alert> filtered;
  std::vector<EpisodeSequence> sequences;
  std::vector<EpisodeSubSequence> subsequences;
  Spdfa model;
  std::vector<Esq> esqs;
  std::vector<ObjectiveKey> objectives;
  std::vector<AttackGraph> graphs;
  std::vector<TeamStats> team_stats;
  std::vector<TeamScore> ranking;  // empty when there is nothing to rank
  std::optional<double> shorter_repeat;
  PerplexityReport perplexity;
  Stage completed = Stage::ingest;
};

/// Runs the stages up to `cfg.stop_after` in memory. Failures throw StageError.
PipelineRun compute_pipeline(const PipelineConfig& cfg);

/// Same stages from already-mapped alerts (ingest starts at filtering).
PipelineRun compute_pipeline(const PipelineConfig& cfg, std::vector<Alert> mapped,
                             ParseStats stats = {});

/// Runs and writes artifacts into `cfg.out_dir`, in stage order:
///   ingest   alerts.tsv
///   episodes episodes.tsv, ess.txt
///   learn    spdfa.txt, spdfa.dot
///   graphs   graphs/attack-graph-*.dot, index.tsv
///   stats    stats.tsv, ranking.tsv, perplexity.tsv, summary.json
/// Artifacts of a previous run are cleared first; on failure everything this
/// run wrote is removed and StageError propagates.
PipelineRun run_pipeline(const PipelineConfig& cfg);

}  // namespace sage

#endif  // SAGE_PIPELINE_HPP
