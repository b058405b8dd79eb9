#include "sage/attack_graphs.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <exception>
#include <sstream>
#include <tuple>

namespace sage {

std::optional<std::size_t> AttackGraph::find_vertex(const VertexId& id) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), id,
                             [](const AgVertex& v, const VertexId& x) { return v.id < x; });
  if (it == vertices.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - vertices.begin());
}

std::vector<ObjectiveKey> find_objectives(std::span<const Esq> esqs) {
  std::set<ObjectiveKey> keys;
  for (const auto& esq : esqs) {
    for (const auto& entry : esq.entries) {
      if (entry.episode.severity() == Severity::High) {
        keys.insert(ObjectiveKey{esq.victim, entry.episode.mcat, entry.episode.mserv});
      }
    }
  }
  return {keys.begin(), keys.end()};
}

namespace {

struct PathStep {
  VertexId id;
  Timestamp et;
};

struct RawPath {
  std::string team;
  std::size_t attempt = 0;
  std::vector<PathStep> steps;
};

bool reaches(const StateEpisode& entry, const ObjectiveKey& key) {
  return entry.episode.mcat == key.mcat && entry.episode.mserv == key.mserv;
}

}  // namespace

AttackGraph extract_ag(const ObjectiveKey& key, std::span<const Esq> esqs, const TeamClock& clock,
                       const Spdfa& model) {
  std::vector<RawPath> raw;
  for (const auto& esq : esqs) {
    if (esq.victim != key.victim) continue;
    std::size_t attempt = 0;
    std::vector<PathStep> current;
    for (const auto& entry : esq.entries) {
      VertexId id{entry.episode.mcat, entry.episode.mserv, entry.sid};
      if (!current.empty() && current.back().id == id) {
        current.back().et = std::max(current.back().et, entry.episode.et);
      } else {
        current.push_back({std::move(id), entry.episode.et});
      }
      if (reaches(entry, key)) {
        raw.push_back({esq.attacker, attempt++, std::move(current)});
        current.clear();
      }
    }
  }
  if (raw.empty()) {
    throw GraphError("no sequence of victim " + key.victim + " reaches " +
                     std::string(acronym(key.mcat)) + "|" + key.mserv);
  }

  AttackGraph ag;
  ag.key = key;
  std::set<VertexId> ids;
  for (const auto& p : raw) {
    for (const auto& s : p.steps) ids.insert(s.id);
  }
  for (const auto& id : ids) {
    AgVertex v;
    v.id = id;
    v.is_objective_variant = id.mcat == key.mcat && id.mserv == key.mserv;
    v.is_sink = id.sid == kOutOfModel ||
                (static_cast<std::size_t>(id.sid) < model.size() && model.is_sink(id.sid));
    ag.vertices.push_back(std::move(v));
  }

  for (const auto& p : raw) {
    auto origin = clock.find(p.team);
    if (origin == clock.end()) throw GraphError("no first-alert time for team " + p.team);
    AttemptPath path{p.team, p.attempt, {}};
    for (const auto& s : p.steps) path.vertices.push_back(*ag.find_vertex(s.id));
    ag.vertices[path.vertices.front()].is_path_start = true;
    for (std::size_t j = 0; j + 1 < p.steps.size(); ++j) {
      const auto elapsed = std::chrono::floor<std::chrono::seconds>(p.steps[j].et - origin->second);
      AgEdge e;
      e.from = path.vertices[j];
      e.to = path.vertices[j + 1];
      e.team = p.team;
      e.seconds_since_first_alert = std::max<long long>(0, elapsed.count());
      e.attempt_index = p.attempt;
      e.position = j;
      ag.edges.push_back(std::move(e));
    }
    ag.teams.insert(p.team);
    ag.paths.push_back(std::move(path));
  }

  std::sort(ag.edges.begin(), ag.edges.end(), [](const AgEdge& a, const AgEdge& b) {
    return std::tie(a.from, a.to, a.team, a.attempt_index, a.position) <
           std::tie(b.from, b.to, b.team, b.attempt_index, b.position);
  });
  std::sort(ag.paths.begin(), ag.paths.end(), [](const AttemptPath& a, const AttemptPath& b) {
    return std::tie(a.team, a.attempt_index) < std::tie(b.team, b.attempt_index);
  });
  return ag;
}

std::vector<AttackGraph> extract_all(std::span<const ObjectiveKey> keys, std::span<const Esq> esqs,
                                     const TeamClock& clock, const Spdfa& model, Execution exec) {
  std::vector<AttackGraph> out(keys.size());
  std::vector<std::exception_ptr> errors(keys.size());
  const auto n = static_cast<long>(keys.size());
  auto one = [&](long i) {
    try {
      out[i] = extract_ag(keys[i], esqs, clock, model);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) one(i);
  } else {
    for (long i = 0; i < n; ++i) one(i);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

namespace {

constexpr std::array<const char*, 4> kTeamStyles = {"dashed", "solid", "dotted", "bold"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string quote(std::string_view s) { return "\"" + escape(s) + "\""; }

std::string node_name(const VertexId& id) {
  return std::string(acronym(id.mcat)) + "|" + id.mserv + "|" + std::to_string(id.sid);
}

const char* shape_of(Severity sev) {
  switch (sev) {
    case Severity::Low: return "oval";
    case Severity::Med: return "box";
    case Severity::High: return "hexagon";
  }
  return "oval";
}

std::string sanitize(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-';
    if (!ok) c = '-';
  }
  return out;
}

}  // namespace

StyleConfig StyleConfig::for_teams(const std::set<std::string>& teams) {
  StyleConfig cfg;
  std::size_t i = 0;
  for (const auto& t : teams) cfg.team_style.emplace(t, kTeamStyles[i++ % kTeamStyles.size()]);
  return cfg;
}

const std::string& StyleConfig::style_of(const std::string& team) const {
  static const std::string fallback = "solid";
  auto it = team_style.find(team);
  return it == team_style.end() ? fallback : it->second;
}

std::string format_hours(long long seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1fh", static_cast<double>(seconds) / 3600.0);
  return buf;
}

std::string dot_file_name(const ObjectiveKey& key) {
  return "attack-graph-" + sanitize(key.victim) + "-" + std::string(acronym(key.mcat)) + "-" +
         sanitize(key.mserv) + ".dot";
}

void emit_dot(std::ostream& out, const AttackGraph& ag, const StyleConfig& style) {
  const std::string name = dot_file_name(ag.key);
  out << "digraph " << quote(name.substr(0, name.size() - 4)) << " {\n";
  out << "  label=" << quote(ag.key.victim + " " + lower(acronym(ag.key.mcat)) + " " + ag.key.mserv)
      << ";\n";
  out << "  labelloc=t;\n";
  out << "  node [fontname=\"Helvetica\"];\n";
  out << "  edge [fontname=\"Helvetica\"];\n";
  for (const auto& team : ag.teams) {
    out << "  // team " << team << ": " << style.style_of(team) << "\n";
  }
  for (const auto& v : ag.vertices) {
    out << "  " << quote(node_name(v.id)) << " [label="
        << "\"" << escape(lower(acronym(v.id.mcat))) << "\\n" << escape(v.id.mserv) << "\\n" << v.id.sid
        << "\""
        << ", shape=" << shape_of(v.severity());
    const char* fill = nullptr;
    if (v.is_objective_variant) {
      fill = "red";
    } else if (v.is_path_start) {
      fill = "yellow";
    }
    if (fill) {
      out << ", style=" << (v.is_sink ? "\"filled,dotted\"" : "filled") << ", fillcolor=" << fill;
    } else if (v.is_sink) {
      out << ", style=dotted";
    }
    out << "];\n";
  }
  for (const auto& e : ag.edges) {
    out << "  " << quote(node_name(ag.vertices[e.from].id)) << " -> "
        << quote(node_name(ag.vertices[e.to].id)) << " [label="
        << quote(format_hours(e.seconds_since_first_alert)) << ", style=" << style.style_of(e.team)
        << ", comment=" << quote("team=" + e.team + " attempt=" + std::to_string(e.attempt_index))
        << "];\n";
  }
  out << "}\n";
}

std::string emit_dot(const AttackGraph& ag, const StyleConfig& style) {
  std::ostringstream os;
  emit_dot(os, ag, style);
  return os.str();
}

std::optional<double> simplicity(const AttackGraph& ag) {
  if (ag.edges.empty()) return std::nullopt;
  return static_cast<double>(ag.vertices.size()) / static_cast<double>(ag.edges.size());
}

void write_index(std::ostream& out, std::span<const AttackGraph> graphs) {
  out << "# adjacent identical <mcat,mserv,sid> vertices within one attempt path are collapsed\n";
  out << "file\tvictim\tmcat\tmserv\tvertices\tedges\tsimplicity\tteams\n";
  for (const auto& ag : graphs) {
    out << dot_file_name(ag.key) << '\t' << ag.key.victim << '\t' << acronym(ag.key.mcat) << '\t'
        << ag.key.mserv << '\t' << ag.vertices.size() << '\t' << ag.edges.size() << '\t';
    if (auto s = simplicity(ag)) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", *s);
      out << buf;
    } else {
      out << "n/a";
    }
    out << '\t';
    bool first = true;
    for (const auto& t : ag.teams) {
      out << (first ? "" : ",") << t;
      first = false;
    }
    out << '\n';
  }
}

}  // namespace sage
