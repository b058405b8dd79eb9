// Brute-force reference computations used by the unit and acceptance tests.
// Deliberately naive and independent of the library's algorithms.
#ifndef SAGE_TESTS_ORACLES_HPP
#define SAGE_TESTS_ORACLES_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "sage/alert_ingest.hpp"
#include "sage/episodes.hpp"
#include "sage/spdfa.hpp"

namespace sage::oracle {

/// Keeps alert i unless some earlier *kept* alert with the same key lies
/// strictly less than t seconds before it.
inline std::vector<Alert> filter_duplicates(const std::vector<Alert>& alerts, double t_seconds) {
  const long long window = static_cast<long long>(t_seconds * 1e6 + 0.5);
  std::vector<Alert> kept;
  for (const auto& a : alerts) {
    bool drop = false;
    for (const auto& k : kept) {
      if (k.attacker == a.attacker && k.victim == a.victim && k.mcat == a.mcat && k.tserv == a.tserv) {
        const long long gap = (a.timestamp - k.timestamp).count();
        if (gap >= 0 && gap < window) drop = true;
      }
    }
    if (!drop) kept.push_back(a);
  }
  return kept;
}

/// Per stage, walk the alerts and start a new group whenever the gap to the
/// previous alert of that stage exceeds w; mode by exhaustive counting.
inline std::vector<Episode> aggregate_episodes(const std::vector<Alert>& alerts, double w_seconds) {
  const long long window = static_cast<long long>(w_seconds * 1e6 + 0.5);
  std::vector<Episode> out;
  for (auto stage : all_stages()) {
    std::vector<std::vector<Alert>> groups;
    for (const auto& a : alerts) {
      if (a.mcat != stage) continue;
      if (groups.empty() || (a.timestamp - groups.back().back().timestamp).count() > window) {
        groups.emplace_back();
      }
      groups.back().push_back(a);
    }
    for (const auto& g : groups) {
      std::string best;
      std::size_t best_n = 0;
      for (const auto& cand : g) {
        std::size_t n = 0;
        for (const auto& x : g) n += x.tserv == cand.tserv;
        if (n > best_n || (n == best_n && cand.tserv < best)) {
          best = cand.tserv;
          best_n = n;
        }
      }
      out.push_back(Episode{g.front().timestamp, g.back().timestamp, stage, best, g.size(),
                            g.front().attacker, g.front().victim});
    }
  }
  std::sort(out.begin(), out.end(), [](const Episode& a, const Episode& b) {
    if (a.st != b.st) return a.st < b.st;
    if (a.severity() != b.severity()) return a.severity() < b.severity();
    if (a.mserv != b.mserv) return a.mserv < b.mserv;
    if (a.mcat != b.mcat) return a.mcat < b.mcat;
    return a.et < b.et;
  });
  return out;
}

/// Positions i such that a cut lies between episodes i and i+1.
inline std::vector<std::size_t> cut_points(const std::vector<Severity>& sev) {
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i + 1 < sev.size(); ++i) {
    if (sev[i] == Severity::High && sev[i + 1] == Severity::Low) cuts.push_back(i);
  }
  return cuts;
}

/// Walks the state table by scanning transitions linearly and comparing
/// rendered symbols.
inline std::vector<int> replay(const Spdfa& model, const std::vector<Symbol>& seq) {
  std::vector<int> out(seq.size(), kOutOfModel);
  int state = 0;
  bool fell_off = false;
  for (std::size_t k = seq.size(); k-- > 0;) {
    if (fell_off) continue;
    int next = -2;
    for (const auto& [sym, t] : model.states()[static_cast<std::size_t>(state)].transitions) {
      if (to_string(model.alphabet().symbols()[static_cast<std::size_t>(sym)]) == to_string(seq[k])) {
        next = t.target;
      }
    }
    if (next < 0) {
      fell_off = true;
      continue;
    }
    state = next;
    out[k] = state;
  }
  return out;
}

/// Counts of (previous, next) over reversed sequences with "^" start and
/// "$" end tokens, by sliding a window of two.
inline std::map<std::pair<std::string, std::string>, std::size_t> bigram_counts(
    const std::vector<std::vector<Symbol>>& sequences) {
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  for (const auto& seq : sequences) {
    std::vector<std::string> tokens{"^"};
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) tokens.push_back(to_string(*it));
    tokens.push_back("$");
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) ++counts[{tokens[i], tokens[i + 1]}];
  }
  return counts;
}

/// Number of reversed sequences that pass through each reversed prefix.
inline std::map<std::vector<std::string>, std::size_t> path_counts(
    const std::vector<std::vector<Symbol>>& sequences) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (const auto& seq : sequences) {
    std::vector<std::string> path;
    ++counts[path];
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
      path.push_back(to_string(*it));
      ++counts[path];
    }
  }
  return counts;
}

}  // namespace sage::oracle

#endif  // SAGE_TESTS_ORACLES_HPP
