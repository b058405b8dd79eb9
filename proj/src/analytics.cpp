#include "sage/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace sage {

std::vector<TeamStats> workload_stats(const PipelineOutputs& outputs) {
  std::map<std::string, TeamStats> by_team;
  auto row = [&](const std::string& team) -> TeamStats& {
    auto& s = by_team[team];
    s.team = team;
    return s;
  };
  for (const auto& a : outputs.mapped_alerts) ++row(a.attacker).raw_alerts;
  for (const auto& a : outputs.filtered_alerts) ++row(a.attacker).filtered_alerts;
  for (const auto& es : outputs.sequences) {
    auto& s = row(es.attacker);
    ++s.es_count;
    s.episodes += es.episodes.size();
  }
  for (const auto& ess : outputs.subsequences) ++row(ess.attacker).ess_count;
  for (const auto& ag : outputs.graphs) {
    for (const auto& team : ag.teams) ++row(team).ag_count;
  }
  std::vector<TeamStats> out;
  out.reserve(by_team.size());
  for (auto& [team, s] : by_team) out.push_back(std::move(s));
  return out;
}

namespace {

int round_half_up_percent(std::size_t part, std::size_t total) {
  // floor((200*part + total) / (2*total)) in exact integer arithmetic
  return static_cast<int>((200 * part + total) / (2 * total));
}

}  // namespace

std::vector<TeamScore> score_teams(std::span<const DiscoveryCounts> counts, std::size_t severe_total,
                                   std::size_t medium_total) {
  if (severe_total == 0 || medium_total == 0) {
    throw std::invalid_argument("rank_teams: no High or Med severity vertices to rank against");
  }
  std::vector<TeamScore> out;
  out.reserve(counts.size());
  for (const auto& c : counts) {
    if (c.severe > severe_total || c.medium > medium_total) {
      throw std::invalid_argument("rank_teams: discovery count exceeds total for team " + c.team);
    }
    TeamScore s;
    s.team = c.team;
    s.severe_vertices = c.severe;
    s.medium_vertices = c.medium;
    s.severe_total = severe_total;
    s.medium_total = medium_total;
    s.severe_percent = round_half_up_percent(c.severe, severe_total);
    s.medium_percent = round_half_up_percent(c.medium, medium_total);
    s.score = (2.0 * s.severe_percent + s.medium_percent) / 3.0;
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const TeamScore& a, const TeamScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.team < b.team;
  });
  return out;
}

std::vector<TeamScore> rank_teams(std::span<const AttackGraph> graphs) {
  std::set<VertexId> severe, medium;
  std::map<std::string, std::pair<std::set<VertexId>, std::set<VertexId>>> found;
  for (const auto& ag : graphs) {
    for (const auto& v : ag.vertices) {
      if (v.severity() == Severity::High) severe.insert(v.id);
      if (v.severity() == Severity::Med) medium.insert(v.id);
    }
    for (const auto& team : ag.teams) found[team];
    for (const auto& e : ag.edges) {
      auto& [sev, med] = found[e.team];
      for (auto idx : {e.from, e.to}) {
        const auto& v = ag.vertices[idx];
        if (v.severity() == Severity::High) sev.insert(v.id);
        if (v.severity() == Severity::Med) med.insert(v.id);
      }
    }
  }
  std::vector<DiscoveryCounts> counts;
  for (const auto& [team, sets] : found) counts.push_back({team, sets.first.size(), sets.second.size()});
  return score_teams(counts, severe.size(), medium.size());
}

std::optional<double> shorter_repeat_ratio(std::span<const AttackGraph> graphs) {
  std::size_t pairs = 0;
  std::size_t shorter = 0;
  for (const auto& ag : graphs) {
    // paths are sorted by (team, attempt)
    for (std::size_t i = 1; i < ag.paths.size(); ++i) {
      const auto& prev = ag.paths[i - 1];
      const auto& cur = ag.paths[i];
      if (prev.team != cur.team) continue;
      ++pairs;
      if (cur.vertices.size() < prev.vertices.size()) ++shorter;
    }
  }
  if (pairs == 0) return std::nullopt;
  return 100.0 * static_cast<double>(shorter) / static_cast<double>(pairs);
}

std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", score);
  return buf;
}

void write_stats_report(std::ostream& out, std::span<const TeamStats> stats) {
  out << "team\talerts_raw\talerts_filtered\tepisodes\tes_esq\tess\tags\n";
  for (const auto& s : stats) {
    out << s.team << '\t' << s.raw_alerts << '\t' << s.filtered_alerts << '\t' << s.episodes << '\t'
        << s.es_count << '\t' << s.ess_count << '\t' << s.ag_count << '\n';
  }
}

void write_ranking_report(std::ostream& out, std::span<const TeamScore> scores) {
  const std::size_t sev_total = scores.empty() ? 0 : scores.front().severe_total;
  const std::size_t med_total = scores.empty() ? 0 : scores.front().medium_total;
  out << "team\tsevere_vertices(of " << sev_total << ")\tsevere_pct\tmedium_vertices(of " << med_total
      << ")\tmedium_pct\tscore\n";
  for (const auto& s : scores) {
    out << s.team << '\t' << s.severe_vertices << '\t' << s.severe_percent << '\t'
        << s.medium_vertices << '\t' << s.medium_percent << '\t' << format_score(s.score) << '\n';
  }
}

}  // namespace sage
