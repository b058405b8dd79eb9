#ifndef SAGE_ATTACK_GRAPHS_HPP
#define SAGE_ATTACK_GRAPHS_HPP

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sage/spdfa.hpp"
#include "sage/types.hpp"

namespace sage {

/// File-level objective: a High-severity stage on one service of one victim.
struct ObjectiveKey {
  std::string victim;
  AttackStage mcat{AttackStage::DATA_EXFILTRATION};
  std::string mserv;

  auto operator<=>(const ObjectiveKey&) const = default;
  bool operator==(const ObjectiveKey&) const = default;
};

/// Vertex identity is the triple (mcat, mServ, sID).
struct VertexId {
  AttackStage mcat{AttackStage::SURFING};
  std::string mserv;
  int sid = kOutOfModel;

  auto operator<=>(const VertexId&) const = default;
  bool operator==(const VertexId&) const = default;
};

struct AgVertex {
  VertexId id;
  bool is_objective_variant = false;
  bool is_sink = false;
  bool is_path_start = false;

  Severity severity() const noexcept { return sage::severity(id.mcat); }
};

struct AgEdge {
  std::size_t from = 0;  // vertex index
  std::size_t to = 0;
  std::string team;
  long long seconds_since_first_alert = 0;
  std::size_t attempt_index = 0;
  std::size_t position = 0;  // edge index along its attempt path
};

/// One attempt of one team: vertex indices in time order, ending at an
/// objective variant.
struct AttemptPath {
  std::string team;
  std::size_t attempt_index = 0;
  std::vector<std::size_t> vertices;
};

struct AttackGraph {
  ObjectiveKey key;
  std::vector<AgVertex> vertices;  // sorted by id
  std::vector<AgEdge> edges;       // sorted by (from, to, team, attempt, position)
  std::vector<AttemptPath> paths;  // sorted by (team, attempt)
  std::set<std::string> teams;

  std::optional<std::size_t> find_vertex(const VertexId& id) const;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Earliest alert timestamp per attacker over the whole data set.
using TeamClock = std::map<std::string, Timestamp>;

/// Distinct (victim, High-stage, service) triples present in any ESQ, sorted.
std::vector<ObjectiveKey> find_objectives(std::span<const Esq> esqs);

/// Every ESQ of the key's victim that reaches the objective contributes one
/// path per objective occurrence. Adjacent repeats of an identical vertex
/// inside a path collapse into one. Throws GraphError when no ESQ reaches
/// the key, or when a team is missing from `clock`.
AttackGraph extract_ag(const ObjectiveKey& key, std::span<const Esq> esqs, const TeamClock& clock,
                       const Spdfa& model);

/// One graph per key, serial or OpenMP; identical output.
std::vector<AttackGraph> extract_all(std::span<const ObjectiveKey> keys, std::span<const Esq> esqs,
                                     const TeamClock& clock, const Spdfa& model,
                                     Execution exec = Execution::parallel);

/// Team -> edge style, assigned cyclically over lexicographically sorted teams.
struct StyleConfig {
  std::map<std::string, std::string> team_style;

  static StyleConfig for_teams(const std::set<std::string>& teams);
  const std::string& style_of(const std::string& team) const;
};

/// Hours with one decimal, e.g. `5.8h`.
std::string format_hours(long long seconds);

std::string dot_file_name(const ObjectiveKey& key);

void emit_dot(std::ostream& out, const AttackGraph& ag, const StyleConfig& style);
std::string emit_dot(const AttackGraph& ag, const StyleConfig& style);

/// |V| / |E| with parallel edges counted individually; nullopt when |E| = 0.
std::optional<double> simplicity(const AttackGraph& ag);

/// Tab-separated index of every graph: file, victim, mcat, mServ, vertices,
/// edges, simplicity, teams.
void write_index(std::ostream& out, std::span<const AttackGraph> graphs);

}  // namespace sage

#endif  // SAGE_ATTACK_GRAPHS_HPP
