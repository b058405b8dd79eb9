#ifndef SAGE_SPDFA_HPP
#define SAGE_SPDFA_HPP

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "sage/episodes.hpp"
#include "sage/types.hpp"

namespace sage {

/// Sorted, deduplicated set of symbols; a symbol's index is its rank.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<Symbol> symbols);

  std::optional<int> index_of(const Symbol& sym) const;
  const Symbol& at(int index) const { return symbols_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<Symbol> symbols_;
};

/// Prefix tree over reversed symbol sequences (suffix orientation).
/// Node ids are breadth-first with children in symbol order, so the tree
/// depends only on the multiset of input sequences.
class PrefixTree {
 public:
  struct Node {
    int parent = -1;
    int symbol = -1;  // incoming symbol index; -1 for the root
    std::size_t count = 0;
    std::size_t final_count = 0;
    std::map<int, int> children;  // symbol index -> node id
  };

  /// Throws std::invalid_argument when a sequence is empty.
  static PrefixTree build(std::span<const std::vector<Symbol>> sequences);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  static constexpr int root() noexcept { return 0; }

  /// Node reached by following `reversed` from the root, if any.
  std::optional<int> find(std::span<const Symbol> reversed) const;

 private:
  Alphabet alphabet_;
  std::vector<Node> nodes_;
};

inline PrefixTree build_suffix_tree(std::span<const std::vector<Symbol>> sequences) {
  return PrefixTree::build(sequences);
}

struct LearnParams {
  std::size_t symbol_count = 5;  // minimum outcome frequency to take part in a test
  std::size_t state_count = 5;   // minimum state occurrence for a test to be binding
  std::size_t sink_count = 5;    // states seen fewer times are sinks
  double alpha = 0.05;           // Hoeffding significance level

  void validate() const;
};

inline constexpr int kOutOfModel = -1;

/// Suffix-oriented probabilistic deterministic automaton. State ids are a
/// breadth-first numbering from the root (id 0).
class Spdfa {
 public:
  struct Transition {
    int target = 0;
    std::size_t count = 0;
    bool operator==(const Transition&) const = default;
  };
  struct State {
    std::size_t count = 0;
    std::size_t final_count = 0;
    bool is_sink = false;
    std::map<int, Transition> transitions;  // symbol index -> transition
    bool operator==(const State&) const = default;
  };

  Spdfa() = default;
  Spdfa(Alphabet alphabet, std::vector<State> states);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<State>& states() const noexcept { return states_; }
  const State& state(int id) const { return states_.at(static_cast<std::size_t>(id)); }
  static constexpr int root() noexcept { return 0; }
  std::size_t size() const noexcept { return states_.size(); }

  std::optional<int> next(int state, const Symbol& sym) const;
  bool is_sink(int sid) const { return sid == kOutOfModel || state(sid).is_sink; }

  /// Throws std::logic_error naming the first violated invariant
  /// (determinism is structural; checks count conservation and targets).
  void check_invariants() const;

  bool operator==(const Spdfa&) const = default;

 private:
  Alphabet alphabet_;
  std::vector<State> states_;
};

/// Red-blue state merging with recursive Hoeffding compatibility tests.
/// Candidate merges are scored in parallel; the chosen merge is the same for
/// both kernels.
Spdfa learn_spdfa(const PrefixTree& tree, const LearnParams& params = {},
                  Execution exec = Execution::parallel);

/// First-order chain over reversed sequences with start/end pseudo-states.
class MarkovChain {
 public:
  static MarkovChain learn(std::span<const std::vector<Symbol>> sequences);

  const Alphabet& alphabet() const noexcept { return alphabet_; }

  /// `from` = nullopt is the start state, `to` = nullopt is termination.
  std::size_t transition_count(const std::optional<Symbol>& from,
                               const std::optional<Symbol>& to) const;
  std::size_t row_total(const std::optional<Symbol>& from) const;

  // indices: 0..|A|-1 symbols, |A| = start (rows) / end (columns)
  std::size_t count(int from, int to) const;
  std::size_t row_total(int from) const;
  int start_index() const noexcept { return static_cast<int>(alphabet_.size()); }
  int end_index() const noexcept { return static_cast<int>(alphabet_.size()); }

 private:
  Alphabet alphabet_;
  std::vector<std::vector<std::size_t>> counts_;  // (|A|+1) x (|A|+1)
  std::vector<std::size_t> totals_;
};

inline MarkovChain learn_markov_chain(std::span<const std::vector<Symbol>> sequences) {
  return MarkovChain::learn(sequences);
}

/// `add_one`: every outcome (each alphabet symbol plus termination) gets one
/// pseudo-count at evaluation time. Once a trace leaves the model (missing
/// transition or unknown symbol) that step costs the smoothed floor and every
/// later outcome is uniform over alphabet-plus-termination.
/// `none`: raw relative frequencies; leaving the model yields probability 0.
enum class Smoothing { add_one, none };

double sequence_log2_probability(const Spdfa& model, std::span<const Symbol> seq,
                                 Smoothing smoothing = Smoothing::add_one);
double sequence_log2_probability(const PrefixTree& model, std::span<const Symbol> seq,
                                 Smoothing smoothing = Smoothing::add_one);
double sequence_log2_probability(const MarkovChain& model, std::span<const Symbol> seq,
                                 Smoothing smoothing = Smoothing::add_one);

template <class Model>
double sequence_probability(const Model& model, std::span<const Symbol> seq,
                            Smoothing smoothing = Smoothing::add_one);

/// Per-sequence log2 probabilities; serial and OpenMP kernels agree exactly.
template <class Model>
std::vector<double> log2_probabilities(const Model& model,
                                       std::span<const std::vector<Symbol>> sequences,
                                       Smoothing smoothing = Smoothing::add_one,
                                       Execution exec = Execution::parallel);

/// 2^(-mean log2 P). Throws std::invalid_argument for an empty list.
double perplexity_from_log2(std::span<const double> log2_probs);
double perplexity_from_probabilities(std::span<const double> probs);

template <class Model>
double perplexity(const Model& model, std::span<const std::vector<Symbol>> sequences,
                  Smoothing smoothing = Smoothing::add_one, Execution exec = Execution::parallel) {
  const auto lp = log2_probabilities(model, sequences, smoothing, exec);
  return perplexity_from_log2(lp);
}

/// sIDs reached per symbol, in forward order. The sequence is consumed
/// reversed from the root; after a missing transition every remaining entry
/// is kOutOfModel.
std::vector<int> replay_states(const Spdfa& model, std::span<const Symbol> seq);

struct StateEpisode {
  Episode episode;
  int sid = kOutOfModel;
  bool operator==(const StateEpisode&) const = default;
};

std::vector<StateEpisode> replay(const Spdfa& model, const EpisodeSubSequence& ess);

/// State-annotated episode sequence of one (attacker, victim).
struct Esq {
  std::string attacker;
  std::string victim;
  std::vector<StateEpisode> entries;
  std::vector<std::size_t> slice_starts;  // entry offset of each sub-sequence
};

Esq build_esq(const EpisodeSequence& es, const Spdfa& model);
std::vector<Esq> build_esqs(std::span<const EpisodeSequence> sequences, const Spdfa& model,
                            Execution exec = Execution::parallel);

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text format:
///   spdfa <TAB> states=N
///   alphabet <TAB> SYM <TAB> SYM ...
///   sID <TAB> occurrence <TAB> final <TAB> is_sink <TAB> SYM>target:count ...
/// with symbols rendered `MCAT_ACRONYM|service`.
void write_spdfa(std::ostream& out, const Spdfa& model);
Spdfa read_spdfa(std::istream& in);

/// States are filled by the highest severity among their incoming symbols
/// (red High, blue Med, white Low); sinks are dotted.
void write_spdfa_dot(std::ostream& out, const Spdfa& model);

}  // namespace sage

#endif  // SAGE_SPDFA_HPP
