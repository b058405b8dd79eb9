#include <cmath>
#include <limits>
#include <numeric>

#include "sage/spdfa.hpp"

namespace sage {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Outcome probability at a state seen `total` times, `hits` for the outcome.
double log2_outcome(std::size_t hits, std::size_t total, std::size_t alphabet, Smoothing smoothing) {
  if (smoothing == Smoothing::add_one) {
    return std::log2(static_cast<double>(hits + 1)) -
           std::log2(static_cast<double>(total + alphabet + 1));
  }
  if (hits == 0 || total == 0) return kNegInf;
  return std::log2(static_cast<double>(hits)) - std::log2(static_cast<double>(total));
}

/// Cost of the steps after a trace leaves the model: `remaining` uniform
/// symbol draws plus the uniform termination.
double log2_off_model(std::size_t remaining, std::size_t alphabet) {
  return -static_cast<double>(remaining + 1) * std::log2(static_cast<double>(alphabet + 1));
}

/// Walks a count automaton along the reversed sequence. `view` supplies
/// count(state), final_count(state) and step(state, sym) -> optional
/// (target, transition count).
template <class View>
double walk_log2(const View& view, const Alphabet& alphabet, std::span<const Symbol> seq,
                 Smoothing smoothing) {
  const std::size_t a = alphabet.size();
  int state = view.root();
  double lp = 0.0;
  std::size_t consumed = 0;
  for (auto it = seq.rbegin(); it != seq.rend(); ++it, ++consumed) {
    const auto idx = alphabet.index_of(*it);
    const auto step = idx ? view.step(state, *idx) : std::nullopt;
    if (!step) {
      if (smoothing == Smoothing::none) return kNegInf;
      lp += log2_outcome(0, view.count(state), a, smoothing);
      return lp + log2_off_model(seq.size() - consumed - 1, a);
    }
    lp += log2_outcome(step->second, view.count(state), a, smoothing);
    state = step->first;
  }
  return lp + log2_outcome(view.final_count(state), view.count(state), a, smoothing);
}

struct SpdfaView {
  const Spdfa& m;
  int root() const { return Spdfa::root(); }
  std::size_t count(int s) const { return m.state(s).count; }
  std::size_t final_count(int s) const { return m.state(s).final_count; }
  std::optional<std::pair<int, std::size_t>> step(int s, int sym) const {
    const auto& tr = m.state(s).transitions;
    auto it = tr.find(sym);
    if (it == tr.end()) return std::nullopt;
    return std::make_pair(it->second.target, it->second.count);
  }
};

struct TreeView {
  const PrefixTree& t;
  int root() const { return PrefixTree::root(); }
  std::size_t count(int s) const { return t.node(s).count; }
  std::size_t final_count(int s) const { return t.node(s).final_count; }
  std::optional<std::pair<int, std::size_t>> step(int s, int sym) const {
    const auto& ch = t.node(s).children;
    auto it = ch.find(sym);
    if (it == ch.end()) return std::nullopt;
    return std::make_pair(it->second, t.node(it->second).count);
  }
};

}  // namespace

MarkovChain MarkovChain::learn(std::span<const std::vector<Symbol>> sequences) {
  std::vector<Symbol> all;
  for (const auto& seq : sequences) {
    if (seq.empty()) throw std::invalid_argument("learn_markov_chain: empty sequence");
    all.insert(all.end(), seq.begin(), seq.end());
  }
  MarkovChain mc;
  mc.alphabet_ = Alphabet(std::move(all));
  const std::size_t dim = mc.alphabet_.size() + 1;
  mc.counts_.assign(dim, std::vector<std::size_t>(dim, 0));
  mc.totals_.assign(dim, 0);
  for (const auto& seq : sequences) {
    int prev = mc.start_index();
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
      const int cur = *mc.alphabet_.index_of(*it);
      ++mc.counts_[static_cast<std::size_t>(prev)][static_cast<std::size_t>(cur)];
      ++mc.totals_[static_cast<std::size_t>(prev)];
      prev = cur;
    }
    ++mc.counts_[static_cast<std::size_t>(prev)][static_cast<std::size_t>(mc.end_index())];
    ++mc.totals_[static_cast<std::size_t>(prev)];
  }
  return mc;
}

std::size_t MarkovChain::count(int from, int to) const {
  return counts_.at(static_cast<std::size_t>(from)).at(static_cast<std::size_t>(to));
}

std::size_t MarkovChain::row_total(int from) const { return totals_.at(static_cast<std::size_t>(from)); }

std::size_t MarkovChain::transition_count(const std::optional<Symbol>& from,
                                          const std::optional<Symbol>& to) const {
  const auto f = from ? alphabet_.index_of(*from) : std::optional<int>(start_index());
  const auto t = to ? alphabet_.index_of(*to) : std::optional<int>(end_index());
  if (!f || !t) return 0;
  return count(*f, *t);
}

std::size_t MarkovChain::row_total(const std::optional<Symbol>& from) const {
  const auto f = from ? alphabet_.index_of(*from) : std::optional<int>(start_index());
  return f ? row_total(*f) : 0;
}

double sequence_log2_probability(const Spdfa& model, std::span<const Symbol> seq,
                                 Smoothing smoothing) {
  return walk_log2(SpdfaView{model}, model.alphabet(), seq, smoothing);
}

double sequence_log2_probability(const PrefixTree& model, std::span<const Symbol> seq,
                                 Smoothing smoothing) {
  return walk_log2(TreeView{model}, model.alphabet(), seq, smoothing);
}

double sequence_log2_probability(const MarkovChain& model, std::span<const Symbol> seq,
                                 Smoothing smoothing) {
  const auto& alphabet = model.alphabet();
  const std::size_t a = alphabet.size();
  std::optional<int> prev = model.start_index();  // nullopt: after an unknown symbol
  double lp = 0.0;
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    const auto cur = alphabet.index_of(*it);
    const std::size_t total = prev ? model.row_total(*prev) : 0;
    const std::size_t hits = (prev && cur) ? model.count(*prev, *cur) : 0;
    if (smoothing == Smoothing::none && (!prev || !cur)) return kNegInf;
    lp += log2_outcome(hits, total, a, smoothing);
    if (lp == kNegInf) return lp;
    prev = cur;
  }
  const std::size_t total = prev ? model.row_total(*prev) : 0;
  const std::size_t hits = prev ? model.count(*prev, model.end_index()) : 0;
  return lp + log2_outcome(hits, total, a, smoothing);
}

template <class Model>
double sequence_probability(const Model& model, std::span<const Symbol> seq, Smoothing smoothing) {
  return std::exp2(sequence_log2_probability(model, seq, smoothing));
}

template <class Model>
std::vector<double> log2_probabilities(const Model& model,
                                       std::span<const std::vector<Symbol>> sequences,
                                       Smoothing smoothing, Execution exec) {
  std::vector<double> out(sequences.size());
  const auto n = static_cast<long>(sequences.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[i] = sequence_log2_probability(model, sequences[i], smoothing);
  } else {
    for (long i = 0; i < n; ++i) out[i] = sequence_log2_probability(model, sequences[i], smoothing);
  }
  return out;
}

double perplexity_from_log2(std::span<const double> log2_probs) {
  if (log2_probs.empty()) throw std::invalid_argument("perplexity: no traces");
  const double sum = std::accumulate(log2_probs.begin(), log2_probs.end(), 0.0);
  return std::exp2(-sum / static_cast<double>(log2_probs.size()));
}

double perplexity_from_probabilities(std::span<const double> probs) {
  std::vector<double> lp;
  lp.reserve(probs.size());
  for (double p : probs) lp.push_back(std::log2(p));
  return perplexity_from_log2(lp);
}

template double sequence_probability<Spdfa>(const Spdfa&, std::span<const Symbol>, Smoothing);
template double sequence_probability<PrefixTree>(const PrefixTree&, std::span<const Symbol>, Smoothing);
template double sequence_probability<MarkovChain>(const MarkovChain&, std::span<const Symbol>, Smoothing);
template std::vector<double> log2_probabilities<Spdfa>(const Spdfa&, std::span<const std::vector<Symbol>>,
                                                       Smoothing, Execution);
template std::vector<double> log2_probabilities<PrefixTree>(const PrefixTree&,
                                                            std::span<const std::vector<Symbol>>,
                                                            Smoothing, Execution);
template std::vector<double> log2_probabilities<MarkovChain>(const MarkovChain&,
                                                             std::span<const std::vector<Symbol>>,
                                                             Smoothing, Execution);

}  // namespace sage
