#include "sage/episodes.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <tuple>

namespace sage {

namespace {

std::string mode_service(std::span<const Alert> run) {
  std::map<std::string_view, std::size_t> freq;
  for (const auto& a : run) ++freq[a.tserv];
  // map iterates lexicographically, so strict > keeps the smallest on ties
  std::string_view best;
  std::size_t best_count = 0;
  for (const auto& [svc, count] : freq) {
    if (count > best_count) {
      best = svc;
      best_count = count;
    }
  }
  return std::string(best);
}

}  // namespace

bool episode_order(const Episode& a, const Episode& b) noexcept {
  return std::make_tuple(a.st, a.severity(), std::string_view(a.mserv), a.mcat, a.et) <
         std::make_tuple(b.st, b.severity(), std::string_view(b.mserv), b.mcat, b.et);
}

std::vector<Episode> aggregate_episodes(std::span<const Alert> alerts, double w_seconds) {
  if (!(w_seconds > 0)) throw std::invalid_argument("aggregate_episodes: w must be positive");
  const Duration window = from_seconds(w_seconds);

  std::array<std::vector<Alert>, kStageCount> by_stage;
  for (const auto& a : alerts) by_stage[static_cast<std::size_t>(a.mcat)].push_back(a);

  std::vector<Episode> out;
  for (const auto& stage_alerts : by_stage) {
    std::size_t begin = 0;
    while (begin < stage_alerts.size()) {
      std::size_t end = begin + 1;
      while (end < stage_alerts.size() &&
             stage_alerts[end].timestamp - stage_alerts[end - 1].timestamp <= window) {
        ++end;
      }
      std::span<const Alert> run(stage_alerts.data() + begin, end - begin);
      const auto& first = run.front();
      out.push_back(Episode{first.timestamp, run.back().timestamp, first.mcat, mode_service(run),
                            run.size(), first.attacker, first.victim});
      begin = end;
    }
  }
  std::sort(out.begin(), out.end(), episode_order);
  return out;
}

std::map<PairKey, std::vector<Alert>> group_by_pair(std::span<const Alert> alerts) {
  std::map<PairKey, std::vector<Alert>> pairs;
  for (const auto& a : alerts) pairs[{a.attacker, a.victim}].push_back(a);
  return pairs;
}

std::vector<std::vector<Episode>> aggregate_all(const std::map<PairKey, std::vector<Alert>>& pairs,
                                                double w_seconds, Execution exec) {
  std::vector<const std::vector<Alert>*> inputs;
  inputs.reserve(pairs.size());
  for (const auto& [key, alerts] : pairs) inputs.push_back(&alerts);
  std::vector<std::vector<Episode>> out(inputs.size());
  const auto n = static_cast<long>(inputs.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) out[i] = aggregate_episodes(*inputs[i], w_seconds);
  } else {
    for (long i = 0; i < n; ++i) out[i] = aggregate_episodes(*inputs[i], w_seconds);
  }
  return out;
}

std::vector<EpisodeSequence> build_sequences(std::span<const Episode> episodes) {
  std::map<PairKey, std::vector<Episode>> grouped;
  for (const auto& e : episodes) grouped[{e.attacker, e.victim}].push_back(e);
  std::vector<EpisodeSequence> out;
  out.reserve(grouped.size());
  for (auto& [key, eps] : grouped) {
    std::stable_sort(eps.begin(), eps.end(), episode_order);
    out.push_back(EpisodeSequence{key.first, key.second, std::move(eps)});
  }
  return out;
}

std::vector<EpisodeSubSequence> partition_subsequences(const EpisodeSequence& es) {
  if (es.episodes.empty()) throw std::invalid_argument("partition_subsequences: empty sequence");
  std::vector<EpisodeSubSequence> out;
  std::size_t begin = 0;
  auto emit = [&](std::size_t end) {
    EpisodeSubSequence ess{es.attacker, es.victim, out.size(), begin, {}};
    ess.episodes.assign(es.episodes.begin() + static_cast<long>(begin),
                        es.episodes.begin() + static_cast<long>(end));
    out.push_back(std::move(ess));
    begin = end;
  };
  for (std::size_t i = 0; i + 1 < es.episodes.size(); ++i) {
    if (es.episodes[i].severity() == Severity::High &&
        es.episodes[i + 1].severity() == Severity::Low) {
      emit(i + 1);
    }
  }
  emit(es.episodes.size());
  return out;
}

std::vector<Symbol> to_symbols(const EpisodeSubSequence& ess) {
  std::vector<Symbol> out;
  out.reserve(ess.episodes.size());
  for (const auto& e : ess.episodes) out.push_back(e.symbol());
  return out;
}

void write_episode_dump(std::ostream& out, std::span<const EpisodeSequence> sequences) {
  for (const auto& es : sequences) {
    for (const auto& e : es.episodes) {
      out << e.attacker << '\t' << e.victim << '\t' << format_timestamp(e.st) << '\t'
          << format_timestamp(e.et) << '\t' << acronym(e.mcat) << '\t' << e.mserv << '\t'
          << e.alert_count << '\n';
    }
  }
}

void write_symbol_corpus(std::ostream& out, std::span<const EpisodeSubSequence> subsequences) {
  for (const auto& ess : subsequences) {
    out << ess.attacker << '\t' << ess.victim << '\t' << ess.index << '\t';
    for (std::size_t i = 0; i < ess.episodes.size(); ++i) {
      if (i) out << ' ';
      out << to_string(ess.episodes[i].symbol());
    }
    out << '\n';
  }
}

}  // namespace sage
