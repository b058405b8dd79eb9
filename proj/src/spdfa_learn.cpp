#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "sage/spdfa.hpp"

namespace sage {

void LearnParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

Spdfa::Spdfa(Alphabet alphabet, std::vector<State> states)
    : alphabet_(std::move(alphabet)), states_(std::move(states)) {}

std::optional<int> Spdfa::next(int state_id, const Symbol& sym) const {
  auto idx = alphabet_.index_of(sym);
  if (!idx) return std::nullopt;
  const auto& trans = state(state_id).transitions;
  auto it = trans.find(*idx);
  if (it == trans.end()) return std::nullopt;
  return it->second.target;
}

void Spdfa::check_invariants() const {
  if (states_.empty()) throw std::logic_error("automaton has no root state");
  for (std::size_t id = 0; id < states_.size(); ++id) {
    const auto& s = states_[id];
    std::size_t out = s.final_count;
    for (const auto& [sym, t] : s.transitions) {
      if (sym < 0 || static_cast<std::size_t>(sym) >= alphabet_.size()) {
        throw std::logic_error("state " + std::to_string(id) + ": symbol outside alphabet");
      }
      if (t.target < 0 || static_cast<std::size_t>(t.target) >= states_.size()) {
        throw std::logic_error("state " + std::to_string(id) + ": dangling transition");
      }
      out += t.count;
    }
    if (out != s.count) {
      throw std::logic_error("state " + std::to_string(id) +
                             ": transition counts plus final count differ from occurrence");
    }
  }
}

namespace {

struct WorkState {
  std::size_t count = 0;
  std::size_t final_count = 0;
  std::map<int, Spdfa::Transition> transitions;
  int parent = -1;
  int parent_symbol = -1;
  bool alive = true;
  bool red = false;
};

double xlogx_ratio(double f, double n) { return f > 0 ? f * std::log(f / n) : 0.0; }

class Learner {
 public:
  Learner(const PrefixTree& tree, const LearnParams& params) : params_(params) {
    params_.validate();
    const auto& nodes = tree.nodes();
    states_.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto& s = states_[i];
      s.count = nodes[i].count;
      s.final_count = nodes[i].final_count;
      s.parent = nodes[i].parent;
      s.parent_symbol = nodes[i].symbol;
      for (const auto& [sym, child] : nodes[i].children) {
        s.transitions.emplace(sym, Spdfa::Transition{child, nodes[static_cast<std::size_t>(child)].count});
      }
    }
    states_[0].red = true;
    red_.push_back(0);
    hoeffding_scale_ = std::sqrt(0.5 * std::log(2.0 / params_.alpha));
  }

  void run(Execution exec) {
    for (;;) {
      const auto blue = blue_candidates();
      if (blue.empty()) break;

      std::vector<std::pair<int, int>> pairs;
      pairs.reserve(blue.size() * red_.size());
      for (int b : blue) {
        for (int r : red_) pairs.emplace_back(r, b);
      }
      std::vector<std::optional<double>> scores(pairs.size());
      const auto n = static_cast<long>(pairs.size());
      if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) scores[i] = merge_score(pairs[i].first, pairs[i].second);
      } else {
        for (long i = 0; i < n; ++i) scores[i] = merge_score(pairs[i].first, pairs[i].second);
      }

      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!scores[i]) continue;
        if (!best || better(*scores[i], pairs[i], *scores[*best], pairs[*best])) best = i;
      }
      if (best) {
        merge(pairs[*best].first, pairs[*best].second);
      } else {
        promote(blue.front());
      }
    }
  }

  Spdfa finish(const Alphabet& alphabet) const {
    std::vector<int> new_id(states_.size(), -1);
    std::vector<int> order;
    std::deque<int> queue{0};
    new_id[0] = 0;
    while (!queue.empty()) {
      const int id = queue.front();
      queue.pop_front();
      order.push_back(id);
      for (const auto& [sym, t] : states_[static_cast<std::size_t>(id)].transitions) {
        if (new_id[static_cast<std::size_t>(t.target)] < 0) {
          new_id[static_cast<std::size_t>(t.target)] = static_cast<int>(order.size() + queue.size());
          queue.push_back(t.target);
        }
      }
    }
    std::vector<Spdfa::State> out(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& src = states_[static_cast<std::size_t>(order[i])];
      auto& dst = out[i];
      dst.count = src.count;
      dst.final_count = src.final_count;
      dst.is_sink = !src.red;
      for (const auto& [sym, t] : src.transitions) {
        dst.transitions.emplace(sym, Spdfa::Transition{new_id[static_cast<std::size_t>(t.target)], t.count});
      }
    }
    return Spdfa(alphabet, std::move(out));
  }

 private:
  static bool better(double score, std::pair<int, int> rb, double other_score,
                     std::pair<int, int> other_rb) {
    if (score != other_score) return score > other_score;
    return rb < other_rb;  // red ascending, then blue ascending
  }

  const WorkState& at(int id) const { return states_[static_cast<std::size_t>(id)]; }
  WorkState& at(int id) { return states_[static_cast<std::size_t>(id)]; }

  /// Non-red targets of red states, ascending id, excluding sinks.
  std::vector<int> blue_candidates() const {
    std::vector<int> out;
    for (int r : red_) {
      for (const auto& [sym, t] : at(r).transitions) {
        const auto& s = at(t.target);
        if (!s.red && s.count >= params_.sink_count) out.push_back(t.target);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::optional<double> merge_score(int red, int blue) const {
    double score = 0.0;
    if (!compatible(red, blue, score)) return std::nullopt;
    return score;
  }

  /// Hoeffding test on every outcome frequent enough in either state, then
  /// recursively on the pairs of states both reach by the same symbol.
  /// Accumulates the log-likelihood change of pooling the tested outcomes.
  bool compatible(int q1, int q2, double& score) const {
    const auto& a = at(q1);
    const auto& b = at(q2);
    const auto n1 = a.count;
    const auto n2 = b.count;
    if (n1 == 0 || n2 == 0 || n1 < params_.state_count || n2 < params_.state_count) return true;
    const double dn1 = static_cast<double>(n1);
    const double dn2 = static_cast<double>(n2);
    const double bound = hoeffding_scale_ * (1.0 / std::sqrt(dn1) + 1.0 / std::sqrt(dn2));

    auto test = [&](std::size_t f1, std::size_t f2) {
      if (f1 < params_.symbol_count && f2 < params_.symbol_count) return true;
      const double p1 = static_cast<double>(f1) / dn1;
      const double p2 = static_cast<double>(f2) / dn2;
      if (!(std::abs(p1 - p2) < bound)) return false;
      const double df1 = static_cast<double>(f1);
      const double df2 = static_cast<double>(f2);
      score += xlogx_ratio(df1 + df2, dn1 + dn2) - xlogx_ratio(df1, dn1) - xlogx_ratio(df2, dn2);
      return true;
    };

    if (!test(a.final_count, b.final_count)) return false;

    auto ia = a.transitions.begin();
    auto ib = b.transitions.begin();
    while (ia != a.transitions.end() || ib != b.transitions.end()) {
      if (ib == b.transitions.end() || (ia != a.transitions.end() && ia->first < ib->first)) {
        if (!test(ia->second.count, 0)) return false;
        ++ia;
      } else if (ia == a.transitions.end() || ib->first < ia->first) {
        if (!test(0, ib->second.count)) return false;
        ++ib;
      } else {
        if (!test(ia->second.count, ib->second.count)) return false;
        ++ia;
        ++ib;
      }
    }

    for (const auto& [sym, tb] : b.transitions) {
      auto it = a.transitions.find(sym);
      if (it == a.transitions.end()) continue;
      if (!compatible(it->second.target, tb.target, score)) return false;
    }
    return true;
  }

  void merge(int red, int blue) {
    auto& parent = at(at(blue).parent);
    parent.transitions.at(at(blue).parent_symbol).target = red;
    fold(red, blue);
  }

  /// Adds `src`'s counts into `dst` and folds colliding transitions.
  void fold(int dst, int src) {
    at(dst).count += at(src).count;
    at(dst).final_count += at(src).final_count;
    for (const auto& [sym, t] : at(src).transitions) {
      auto it = at(dst).transitions.find(sym);
      if (it != at(dst).transitions.end()) {
        it->second.count += t.count;
        const int next = it->second.target;
        fold(next, t.target);
      } else {
        at(dst).transitions.emplace(sym, t);
        at(t.target).parent = dst;
        at(t.target).parent_symbol = sym;
      }
    }
    at(src).alive = false;
    at(src).transitions.clear();
  }

  void promote(int blue) {
    at(blue).red = true;
    red_.insert(std::upper_bound(red_.begin(), red_.end(), blue), blue);
  }

  LearnParams params_;
  double hoeffding_scale_ = 0.0;
  std::vector<WorkState> states_;
  std::vector<int> red_;  // ascending
};

}  // namespace

Spdfa learn_spdfa(const PrefixTree& tree, const LearnParams& params, Execution exec) {
  Learner learner(tree, params);
  learner.run(exec);
  return learner.finish(tree.alphabet());
}

}  // namespace sage
