#ifndef SAGE_ANALYTICS_HPP
#define SAGE_ANALYTICS_HPP

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sage/alert_ingest.hpp"
#include "sage/attack_graphs.hpp"
#include "sage/episodes.hpp"

namespace sage {

/// Per-team workload reduction counts.
struct TeamStats {
  std::string team;
  std::size_t raw_alerts = 0;
  std::size_t filtered_alerts = 0;
  std::size_t episodes = 0;
  std::size_t es_count = 0;
  std::size_t ess_count = 0;
  std::size_t ag_count = 0;

  bool operator==(const TeamStats&) const = default;
};

/// Intermediate pipeline products the statistics are tallied from.
struct PipelineOutputs {
  std::span<const Alert> mapped_alerts;    // before duplicate filtering
  std::span<const Alert> filtered_alerts;
  std::span<const EpisodeSequence> sequences;
  std::span<const EpisodeSubSequence> subsequences;
  std::span<const AttackGraph> graphs;
};

/// One row per attacker seen anywhere in the outputs, sorted by team id.
/// A graph counts for every team with a path in it.
std::vector<TeamStats> workload_stats(const PipelineOutputs& outputs);

struct TeamScore {
  std::string team;
  std::size_t severe_vertices = 0;
  std::size_t medium_vertices = 0;
  std::size_t severe_total = 0;
  std::size_t medium_total = 0;
  int severe_percent = 0;
  int medium_percent = 0;
  double score = 0.0;
};

struct DiscoveryCounts {
  std::string team;
  std::size_t severe = 0;
  std::size_t medium = 0;
};

/// Rounds each percentage half-up to an integer, then weights High twice:
/// (2*sev% + med%) / 3. Sorted by score descending, then team ascending.
/// Throws std::invalid_argument when either total is zero or a count
/// exceeds its total.
std::vector<TeamScore> score_teams(std::span<const DiscoveryCounts> counts, std::size_t severe_total,
                                   std::size_t medium_total);

/// Totals are distinct High / Med vertex triples over all graphs; a team
/// discovers a vertex when one of its edges touches it. Teams whose paths
/// are all single vertices are listed with zero discoveries.
std::vector<TeamScore> rank_teams(std::span<const AttackGraph> graphs);

/// Share (percent) of consecutive attempt pairs of the same team at the same
/// objective where the later path has strictly fewer vertices; nullopt when
/// no team attempts any objective twice.
std::optional<double> shorter_repeat_ratio(std::span<const AttackGraph> graphs);

/// Columns mirror the workload table: team, raw, filtered, episodes, ES/ESQ, ESS, AGs.
void write_stats_report(std::ostream& out, std::span<const TeamStats> stats);

/// Columns mirror the ranking table: team, severe (pct), medium (pct), score.
void write_ranking_report(std::ostream& out, std::span<const TeamScore> scores);

std::string format_score(double score);

}  // namespace sage

#endif  // SAGE_ANALYTICS_HPP
