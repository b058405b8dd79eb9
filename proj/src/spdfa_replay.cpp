#include <algorithm>
#include <sstream>
#include <string>

#include "sage/spdfa.hpp"

namespace sage {

std::vector<int> replay_states(const Spdfa& model, std::span<const Symbol> seq) {
  std::vector<int> sids(seq.size(), kOutOfModel);
  int state = Spdfa::root();
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const std::size_t pos = seq.size() - 1 - k;
    auto next = model.next(state, seq[pos]);
    if (!next) break;
    state = *next;
    sids[pos] = state;
  }
  return sids;
}

std::vector<StateEpisode> replay(const Spdfa& model, const EpisodeSubSequence& ess) {
  const auto symbols = to_symbols(ess);
  const auto sids = replay_states(model, symbols);
  std::vector<StateEpisode> out;
  out.reserve(ess.episodes.size());
  for (std::size_t i = 0; i < ess.episodes.size(); ++i) out.push_back({ess.episodes[i], sids[i]});
  return out;
}

Esq build_esq(const EpisodeSequence& es, const Spdfa& model) {
  Esq esq{es.attacker, es.victim, {}, {}};
  esq.entries.reserve(es.episodes.size());
  for (const auto& ess : partition_subsequences(es)) {
    esq.slice_starts.push_back(esq.entries.size());
    auto part = replay(model, ess);
    std::move(part.begin(), part.end(), std::back_inserter(esq.entries));
  }
  return esq;
}

std::vector<Esq> build_esqs(std::span<const EpisodeSequence> sequences, const Spdfa& model,
                            Execution exec) {
  std::vector<Esq> out(sequences.size());
  const auto n = static_cast<long>(sequences.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) out[i] = build_esq(sequences[i], model);
  } else {
    for (long i = 0; i < n; ++i) out[i] = build_esq(sequences[i], model);
  }
  return out;
}

void write_spdfa(std::ostream& out, const Spdfa& model) {
  out << "spdfa\tstates=" << model.size() << '\n';
  out << "alphabet";
  for (const auto& sym : model.alphabet().symbols()) out << '\t' << to_string(sym);
  out << '\n';
  for (std::size_t id = 0; id < model.size(); ++id) {
    const auto& s = model.states()[id];
    out << id << '\t' << s.count << '\t' << s.final_count << '\t' << (s.is_sink ? 1 : 0);
    for (const auto& [sym, t] : s.transitions) {
      out << '\t' << to_string(model.alphabet().at(sym)) << '>' << t.target << ':' << t.count;
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  for (;;) {
    const auto tab = line.find('\t', begin);
    out.push_back(line.substr(begin, tab == std::string::npos ? std::string::npos : tab - begin));
    if (tab == std::string::npos) break;
    begin = tab + 1;
  }
  return out;
}

std::size_t to_size(const std::string& text, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size() || text.front() == '-') {
    throw ModelFormatError(std::string("bad ") + what + ": '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

Spdfa read_spdfa(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("spdfa\tstates=", 0) != 0) {
    throw ModelFormatError("missing spdfa header");
  }
  const std::size_t n = to_size(line.substr(13), "state count");

  if (!std::getline(in, line)) throw ModelFormatError("missing alphabet line");
  auto fields = split_tabs(line);
  if (fields.front() != "alphabet") throw ModelFormatError("missing alphabet line");
  std::vector<Symbol> symbols;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    auto sym = parse_symbol(fields[i]);
    if (!sym) throw ModelFormatError("bad alphabet symbol '" + fields[i] + "'");
    symbols.push_back(std::move(*sym));
  }
  Alphabet alphabet(symbols);
  if (alphabet.size() != symbols.size()) throw ModelFormatError("alphabet contains duplicates");

  std::vector<Spdfa::State> states(n);
  for (std::size_t id = 0; id < n; ++id) {
    if (!std::getline(in, line)) throw ModelFormatError("truncated state list");
    fields = split_tabs(line);
    if (fields.size() < 4 || to_size(fields[0], "state id") != id) {
      throw ModelFormatError("state line " + std::to_string(id) + " malformed");
    }
    auto& s = states[id];
    s.count = to_size(fields[1], "occurrence");
    s.final_count = to_size(fields[2], "final count");
    if (fields[3] != "0" && fields[3] != "1") throw ModelFormatError("bad sink flag");
    s.is_sink = fields[3] == "1";
    for (std::size_t i = 4; i < fields.size(); ++i) {
      const auto& tok = fields[i];
      const auto gt = tok.rfind('>');
      const auto colon = tok.rfind(':');
      if (gt == std::string::npos || colon == std::string::npos || colon < gt) {
        throw ModelFormatError("bad transition '" + tok + "'");
      }
      auto sym = parse_symbol(tok.substr(0, gt));
      auto idx = sym ? alphabet.index_of(*sym) : std::nullopt;
      if (!idx) throw ModelFormatError("transition symbol not in alphabet: '" + tok + "'");
      const auto target = to_size(tok.substr(gt + 1, colon - gt - 1), "target");
      const auto count = to_size(tok.substr(colon + 1), "transition count");
      if (target >= n) throw ModelFormatError("transition target out of range");
      if (!s.transitions.emplace(*idx, Spdfa::Transition{static_cast<int>(target), count}).second) {
        throw ModelFormatError("nondeterministic transition in state " + std::to_string(id));
      }
    }
  }
  return Spdfa(std::move(alphabet), std::move(states));
}

void write_spdfa_dot(std::ostream& out, const Spdfa& model) {
  std::vector<std::optional<Severity>> incoming(model.size());
  for (const auto& s : model.states()) {
    for (const auto& [sym, t] : s.transitions) {
      const auto sev = severity(model.alphabet().at(sym).mcat);
      auto& slot = incoming[static_cast<std::size_t>(t.target)];
      if (!slot || *slot < sev) slot = sev;
    }
  }
  out << "digraph spdfa {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle, style=filled, fontname=\"Helvetica\"];\n";
  for (std::size_t id = 0; id < model.size(); ++id) {
    const auto& s = model.states()[id];
    const char* fill = "white";
    if (incoming[id] == Severity::High) fill = "red";
    if (incoming[id] == Severity::Med) fill = "blue";
    out << "  s" << id << " [label=\"" << id << "\\n" << s.count << "\", fillcolor=" << fill;
    if (s.is_sink) out << ", style=\"filled,dotted\"";
    out << "];\n";
  }
  for (std::size_t id = 0; id < model.size(); ++id) {
    for (const auto& [sym, t] : model.states()[id].transitions) {
      out << "  s" << id << " -> s" << t.target << " [label=\"" << to_string(model.alphabet().at(sym))
          << " (" << t.count << ")\"];\n";
    }
  }
  out << "}\n";
}

}  // namespace sage
