#ifndef SAGE_EPISODES_HPP
#define SAGE_EPISODES_HPP

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sage/alert_ingest.hpp"
#include "sage/types.hpp"

namespace sage {

/// Burst of same-stage alerts for one (attacker, victim).
struct Episode {
  Timestamp st;
  Timestamp et;
  AttackStage mcat{AttackStage::SURFING};
  std::string mserv;
  std::size_t alert_count = 0;
  std::string attacker;
  std::string victim;

  Severity severity() const noexcept { return sage::severity(mcat); }
  Symbol symbol() const { return Symbol{mcat, mserv}; }
  bool operator==(const Episode&) const = default;
};

using PairKey = std::pair<std::string, std::string>;  // (attacker, victim)

/// Sequence order: st, then severity ascending, then mServ; mcat and et
/// complete the order so sorting is total.
bool episode_order(const Episode& a, const Episode& b) noexcept;

/// Episodes of one (attacker, victim) pair, sorted by `episode_order`.
struct EpisodeSequence {
  std::string attacker;
  std::string victim;
  std::vector<Episode> episodes;
};

/// Attack-attempt slice of an episode sequence.
struct EpisodeSubSequence {
  std::string attacker;
  std::string victim;
  std::size_t index = 0;    // position among the parent's slices
  std::size_t offset = 0;   // first episode's position in the parent sequence
  std::vector<Episode> episodes;
};

/// Splits each stage's alerts into maximal runs with consecutive gaps <= w.
/// `alerts` must belong to one (attacker, victim) and be sorted by time.
std::vector<Episode> aggregate_episodes(std::span<const Alert> alerts, double w_seconds);

/// Groups filtered alerts by (attacker, victim), preserving time order.
std::map<PairKey, std::vector<Alert>> group_by_pair(std::span<const Alert> alerts);

/// Aggregates every pair; the parallel and serial kernels give identical
/// output, ordered by pair key.
std::vector<std::vector<Episode>> aggregate_all(const std::map<PairKey, std::vector<Alert>>& pairs,
                                                double w_seconds,
                                                Execution exec = Execution::parallel);

/// One sequence per (attacker, victim), sorted by pair key.
std::vector<EpisodeSequence> build_sequences(std::span<const Episode> episodes);

/// Cuts between every High-severity episode and an immediately following
/// Low-severity one. Throws std::invalid_argument on an empty sequence.
std::vector<EpisodeSubSequence> partition_subsequences(const EpisodeSequence& es);

std::vector<Symbol> to_symbols(const EpisodeSubSequence& ess);

/// Tab-separated: attacker, victim, st, et, mcat, mServ, alert_count.
void write_episode_dump(std::ostream& out, std::span<const EpisodeSequence> sequences);

/// One sub-sequence per line: attacker, victim, index, then space-separated
/// `MCAT|service` symbols.
void write_symbol_corpus(std::ostream& out, std::span<const EpisodeSubSequence> subsequences);

}  // namespace sage

#endif  // SAGE_EPISODES_HPP
