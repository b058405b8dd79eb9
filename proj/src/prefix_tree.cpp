#include <algorithm>
#include <deque>
#include <set>

#include "sage/spdfa.hpp"

namespace sage {

Alphabet::Alphabet(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  std::sort(symbols_.begin(), symbols_.end());
  symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
}

std::optional<int> Alphabet::index_of(const Symbol& sym) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), sym);
  if (it == symbols_.end() || *it != sym) return std::nullopt;
  return static_cast<int>(it - symbols_.begin());
}

PrefixTree PrefixTree::build(std::span<const std::vector<Symbol>> sequences) {
  std::vector<Symbol> all;
  for (const auto& seq : sequences) {
    if (seq.empty()) throw std::invalid_argument("build_suffix_tree: empty sequence");
    all.insert(all.end(), seq.begin(), seq.end());
  }
  PrefixTree tree;
  tree.alphabet_ = Alphabet(std::move(all));

  // Insert in arrival order, then renumber breadth-first.
  std::vector<Node> raw(1);
  for (const auto& seq : sequences) {
    int cur = 0;
    ++raw[0].count;
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
      const int sym = *tree.alphabet_.index_of(*it);
      auto child = raw[static_cast<std::size_t>(cur)].children.find(sym);
      int next;
      if (child == raw[static_cast<std::size_t>(cur)].children.end()) {
        next = static_cast<int>(raw.size());
        raw[static_cast<std::size_t>(cur)].children.emplace(sym, next);
        Node n;
        n.parent = cur;
        n.symbol = sym;
        raw.push_back(std::move(n));
      } else {
        next = child->second;
      }
      cur = next;
      ++raw[static_cast<std::size_t>(cur)].count;
    }
    ++raw[static_cast<std::size_t>(cur)].final_count;
  }

  std::vector<int> new_id(raw.size(), -1);
  std::vector<int> order;
  order.reserve(raw.size());
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    new_id[static_cast<std::size_t>(id)] = static_cast<int>(order.size());
    order.push_back(id);
    for (const auto& [sym, child] : raw[static_cast<std::size_t>(id)].children) queue.push_back(child);
  }
  tree.nodes_.resize(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& src = raw[static_cast<std::size_t>(order[i])];
    Node& dst = tree.nodes_[i];
    dst.parent = src.parent < 0 ? -1 : new_id[static_cast<std::size_t>(src.parent)];
    dst.symbol = src.symbol;
    dst.count = src.count;
    dst.final_count = src.final_count;
    for (const auto& [sym, child] : src.children) {
      dst.children.emplace(sym, new_id[static_cast<std::size_t>(child)]);
    }
  }
  return tree;
}

std::optional<int> PrefixTree::find(std::span<const Symbol> reversed) const {
  int cur = root();
  for (const auto& sym : reversed) {
    auto idx = alphabet_.index_of(sym);
    if (!idx) return std::nullopt;
    const auto& children = node(cur).children;
    auto it = children.find(*idx);
    if (it == children.end()) return std::nullopt;
    cur = it->second;
  }
  return cur;
}

}  // namespace sage
