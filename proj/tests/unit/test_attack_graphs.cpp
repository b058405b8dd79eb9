#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "sage/attack_graphs.hpp"
#include "support/generators.hpp"

using namespace sage;
using sage::testing::at_seconds;
using sage::testing::make_episode;

namespace {

using A = AttackStage;

struct Step {
  A mcat;
  const char* serv;
  int sid;
  double et;
};

Esq esq_of(const std::string& team, const std::string& victim, const std::vector<Step>& steps) {
  Esq esq{team, victim, {}, {0}};
  for (const auto& s : steps) {
    esq.entries.push_back({make_episode(s.et, s.et, s.mcat, s.serv, team, victim), s.sid});
  }
  return esq;
}

TeamClock clock_for(std::initializer_list<std::string> teams, double origin = 0.0) {
  TeamClock c;
  for (const auto& t : teams) c[t] = at_seconds(origin);
  return c;
}

const ObjectiveKey kExfil{"10.0.0.20", A::DATA_EXFILTRATION, "remoteware-cl"};

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("attack_graphs") {

TEST_CASE("objectives") {
  CHECK(find_objectives(std::vector<Esq>{esq_of("t", "v", {{A::VULN_DISC, "http", 1, 0}})}).empty());

  const std::vector<Esq> one{esq_of("T1", "10.0.0.20",
                                    {{A::VULN_DISC, "http", 1, 0},
                                     {A::DATA_EXFILTRATION, "remoteware-cl", 2, 10}})};
  CHECK(find_objectives(one) == std::vector<ObjectiveKey>{kExfil});

  std::vector<Esq> grid;
  std::set<ObjectiveKey> expected;
  std::mt19937_64 rng(5);
  for (const char* victim : {"v1", "v2", "v3"}) {
    for (auto stage : {A::DATA_EXFILTRATION, A::NETWORK_DOS}) {
      for (int copy = 0; copy < 2; ++copy) {
        grid.push_back(esq_of("t" + std::to_string(copy), victim,
                              {{A::SERVICE_DISC, "ssh", 1, 0}, {stage, "ssh", 3, 5}, {A::PRIV_ESC, "ssh", 2, 9}}));
      }
    }
  }
  for (const auto& e : grid) {
    for (const auto& x : e.entries) {
      if (x.episode.severity() == Severity::High) expected.insert({e.victim, x.episode.mcat, x.episode.mserv});
    }
  }
  const auto keys = find_objectives(grid);
  CHECK(keys.size() == 6);
  CHECK(std::set<ObjectiveKey>(keys.begin(), keys.end()) == expected);
}

TEST_CASE("single attempt transcribes directly") {
  const std::vector<Esq> esqs{esq_of("T1", "10.0.0.20",
                                     {{A::SERVICE_DISC, "ssh", 1, 3600},
                                      {A::PRIV_ESC, "ssh", 2, 7200},
                                      {A::DATA_EXFILTRATION, "remoteware-cl", 3, 9000}})};
  const auto ag = extract_ag(kExfil, esqs, clock_for({"T1"}), Spdfa{});
  CHECK(ag.vertices.size() == 3);
  CHECK(ag.edges.size() == 2);
  std::size_t objectives = 0;
  for (const auto& v : ag.vertices) objectives += v.is_objective_variant;
  CHECK(objectives == 1);
  REQUIRE(ag.paths.size() == 1);
  CHECK(ag.vertices[ag.paths[0].vertices.front()].is_path_start);
  CHECK(simplicity(ag) == doctest::Approx(1.5));

  const auto dot = emit_dot(ag, StyleConfig::for_teams(ag.teams));
  CHECK(dot.find("shape=oval") != std::string::npos);
  CHECK(dot.find("shape=box") != std::string::npos);
  CHECK(dot.find("shape=hexagon") != std::string::npos);
  CHECK(dot.find("label=\"1.0h\"") != std::string::npos);
  CHECK(dot.find("label=\"2.0h\"") != std::string::npos);
  CHECK(dot.find("fillcolor=red") != std::string::npos);
  CHECK(dot.find("fillcolor=yellow") != std::string::npos);
}

TEST_CASE("achieving the objective twice yields two paths sharing vertices") {
  // re-exploitation: second attempt skips reconnaissance
  const std::vector<Esq> esqs{esq_of("T1", "10.0.0.20",
                                     {{A::SERVICE_DISC, "ssh", 1, 0},
                                      {A::VULN_DISC, "http", 4, 10},
                                      {A::PRIV_ESC, "ssh", 2, 20},
                                      {A::DATA_EXFILTRATION, "remoteware-cl", 3, 30},
                                      {A::PRIV_ESC, "ssh", 2, 40},
                                      {A::DATA_EXFILTRATION, "remoteware-cl", 3, 50}})};
  const auto ag = extract_ag(kExfil, esqs, clock_for({"T1"}), Spdfa{});
  REQUIRE(ag.paths.size() == 2);
  CHECK(ag.paths[0].vertices.size() == 4);
  CHECK(ag.paths[1].vertices.size() == 2);
  CHECK(ag.paths[1].vertices.size() < ag.paths[0].vertices.size());
  CHECK(ag.vertices.size() == 4);
  CHECK(ag.edges.size() == 4);
  CHECK(ag.paths[0].vertices.back() == ag.paths[1].vertices.back());
}

TEST_CASE("adjacent identical vertices collapse, keeping the latest end time") {
  const std::vector<Esq> esqs{esq_of("T1", "10.0.0.20",
                                     {{A::SERVICE_DISC, "ssh", 1, 0},
                                      {A::SERVICE_DISC, "ssh", 1, 7200},
                                      {A::DATA_EXFILTRATION, "remoteware-cl", 3, 9000}})};
  const auto ag = extract_ag(kExfil, esqs, clock_for({"T1"}), Spdfa{});
  CHECK(ag.vertices.size() == 2);
  REQUIRE(ag.edges.size() == 1);
  CHECK(ag.edges[0].seconds_since_first_alert == 7200);
}

TEST_CASE("edge times are measured from the team's first alert and never negative") {
  const std::vector<Esq> esqs{esq_of("T1", "10.0.0.20",
                                     {{A::SERVICE_DISC, "ssh", 1, 100.9},
                                      {A::DATA_EXFILTRATION, "remoteware-cl", 3, 900}})};
  auto ag = extract_ag(kExfil, esqs, clock_for({"T1"}, 50.0), Spdfa{});
  REQUIRE(ag.edges.size() == 1);
  CHECK(ag.edges[0].seconds_since_first_alert == 50);
  ag = extract_ag(kExfil, esqs, clock_for({"T1"}, 500.0), Spdfa{});
  CHECK(ag.edges[0].seconds_since_first_alert == 0);
  CHECK_THROWS_AS(extract_ag(kExfil, esqs, TeamClock{}, Spdfa{}), GraphError);
}

TEST_CASE("three teams share one graph with distinct edge styles") {
  std::vector<Esq> esqs;
  for (const char* team : {"T1", "T5", "T8"}) {
    esqs.push_back(esq_of(team, "10.0.0.20",
                          {{A::SERVICE_DISC, "ssh", 1, 0}, {A::DATA_EXFILTRATION, "remoteware-cl", 3, 60}}));
  }
  esqs.push_back(esq_of("T9", "10.0.0.99",
                        {{A::SERVICE_DISC, "ssh", 1, 0}, {A::DATA_EXFILTRATION, "remoteware-cl", 3, 60}}));
  const auto ag = extract_ag(kExfil, esqs, clock_for({"T1", "T5", "T8", "T9"}), Spdfa{});
  CHECK(ag.teams == std::set<std::string>{"T1", "T5", "T8"});
  CHECK(ag.edges.size() == 3);
  const auto style = StyleConfig::for_teams(ag.teams);
  CHECK(style.style_of("T1") == "dashed");
  CHECK(style.style_of("T5") == "solid");
  CHECK(style.style_of("T8") == "dotted");
  const auto dot = emit_dot(ag, style);
  CHECK(count_of(dot, "style=dashed") == 1);
  CHECK(count_of(dot, "style=solid") == 1);
  CHECK(count_of(dot, "style=dotted") == 1);
}

TEST_CASE("missing objective is an error") {
  const std::vector<Esq> esqs{esq_of("T1", "10.0.0.20", {{A::SERVICE_DISC, "ssh", 1, 0}})};
  CHECK_THROWS_AS(extract_ag(kExfil, esqs, clock_for({"T1"}), Spdfa{}), GraphError);
}

TEST_CASE("single-vertex graph emits one node and no edges") {
  const std::vector<Esq> esqs{esq_of("T1", "10.0.0.20", {{A::DATA_EXFILTRATION, "remoteware-cl", -1, 0}})};
  const auto ag = extract_ag(kExfil, esqs, clock_for({"T1"}), Spdfa{});
  CHECK(ag.vertices.size() == 1);
  CHECK(ag.edges.empty());
  CHECK_FALSE(simplicity(ag).has_value());
  const auto dot = emit_dot(ag, StyleConfig::for_teams(ag.teams));
  CHECK(count_of(dot, "->") == 0);
  CHECK(count_of(dot, "shape=") == 1);
  CHECK(dot.find("style=\"filled,dotted\"") != std::string::npos);
}

TEST_CASE("simplicity is vertices over edges") {
  AttackGraph ag;
  ag.vertices.resize(2);
  ag.edges.resize(1);
  CHECK(*simplicity(ag) == 2.0);
  ag.vertices.resize(3);
  ag.edges.resize(4);
  CHECK(*simplicity(ag) == 0.75);
}

TEST_CASE("file names and hour labels") {
  CHECK(dot_file_name(kExfil) == "attack-graph-10-0-0-20-DATA_EXFILTRATION-remoteware-cl.dot");
  CHECK(dot_file_name({"fe80::1", A::NETWORK_DOS, "a/b"}) == "attack-graph-fe80--1-NETWORK_DOS-a-b.dot");
  CHECK(format_hours(21000) == "5.8h");
  CHECK(format_hours(0) == "0.0h");
}

TEST_CASE("every path ends at an objective variant; kernels agree") {
  std::mt19937_64 rng(17);
  const std::vector<Step> pool{{A::SERVICE_DISC, "ssh", 1, 0}, {A::VULN_DISC, "http", 2, 0},
                               {A::PRIV_ESC, "ssh", 3, 0},     {A::DATA_EXFILTRATION, "ssh", 4, 0},
                               {A::NETWORK_DOS, "http", 5, 0}, {A::DATA_EXFILTRATION, "ssh", -1, 0}};
  std::vector<Esq> esqs;
  TeamClock clock;
  for (int i = 0; i < 12; ++i) {
    const std::string team = "t" + std::to_string(i % 4);
    clock[team] = at_seconds(0);
    std::vector<Step> steps;
    for (int k = 0; k < 8; ++k) {
      auto s = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      s.et = 10.0 * k;
      steps.push_back(s);
    }
    esqs.push_back(esq_of(team, i % 2 ? "v1" : "v2", steps));
  }
  const auto keys = find_objectives(esqs);
  REQUIRE_FALSE(keys.empty());
  const auto serial = extract_all(keys, esqs, clock, Spdfa{}, Execution::serial);
  const auto parallel = extract_all(keys, esqs, clock, Spdfa{}, Execution::parallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    const auto& ag = serial[i];
    const auto style = StyleConfig::for_teams(ag.teams);
    CHECK(emit_dot(ag, style) == emit_dot(parallel[i], style));
    for (const auto& p : ag.paths) {
      const auto& last = ag.vertices[p.vertices.back()];
      CHECK(last.is_objective_variant);
      for (std::size_t j = 1; j < p.vertices.size(); ++j) CHECK(p.vertices[j] != p.vertices[j - 1]);
    }
  }
}

TEST_CASE("index lists every graph") {
  const std::vector<Esq> esqs{esq_of("T1", "10.0.0.20",
                                     {{A::SERVICE_DISC, "ssh", 1, 0},
                                      {A::DATA_EXFILTRATION, "remoteware-cl", 3, 60}})};
  const auto ag = extract_ag(kExfil, esqs, clock_for({"T1"}), Spdfa{});
  std::ostringstream out;
  write_index(out, std::vector<AttackGraph>{ag});
  CHECK(out.str().find("attack-graph-10-0-0-20-DATA_EXFILTRATION-remoteware-cl.dot\t10.0.0.20\t"
                       "DATA_EXFILTRATION\tremoteware-cl\t2\t1\t2.0000\tT1\n") != std::string::npos);
}

}  // TEST_SUITE
