#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "sage/pipeline.hpp"
#include "support/files.hpp"

using namespace sage;
using sage::testing::ScratchDir;
using sage::testing::slurp;
using sage::testing::snapshot;

namespace {

const std::string kFixtures = SAGE_TEST_FIXTURES;
const std::string kGolden = SAGE_TEST_GOLDEN;
const std::string kData = SAGE_TEST_DATA;

PipelineConfig fixture_config(const std::filesystem::path& out) {
  PipelineConfig cfg;
  cfg.alerts = {kFixtures + "/golden_alerts.eve.json"};
  cfg.sig_map = kData + "/signature_rules.tsv";
  cfg.port_map = kData + "/service-names-port-numbers.csv";
  cfg.out_dir = out;
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SAGE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("golden fixture reproduces the committed artifacts byte for byte") {
  ScratchDir out("golden");
  run_pipeline(fixture_config(out.path()));
  const auto produced = snapshot(out.path());
  const auto expected = snapshot(kGolden);
  REQUIRE_FALSE(expected.empty());
  for (const auto& [name, body] : expected) {
    CAPTURE(name);
    auto it = produced.find(name);
    REQUIRE(it != produced.end());
    CHECK(it->second == body);
  }
  CHECK(produced.size() == expected.size());
}

TEST_CASE("fixture shape: 3 teams, 4 victims, 2 objectives") {
  const auto run = compute_pipeline(fixture_config({}));
  std::set<std::string> teams, victims;
  for (const auto& a : run.filtered) {
    teams.insert(a.attacker);
    victims.insert(a.victim);
  }
  CHECK(teams.size() == 3);
  CHECK(victims.size() == 4);
  CHECK(run.objectives.size() == 2);
  CHECK(run.graphs.size() == 2);
  CHECK(run.parse_stats.skipped == 1);
  CHECK(run.parse_stats.ignored == 1);
}

TEST_CASE("workload stats equal a recount of the intermediate dumps") {
  ScratchDir out("recount");
  const auto run = run_pipeline(fixture_config(out.path()));
  std::map<std::string, TeamStats> recount;
  {
    std::ifstream in(out / "alerts.tsv");
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::istringstream f(line);
      std::string timestamp, attacker;
      std::getline(f, timestamp, '\t');
      std::getline(f, attacker, '\t');
      ++recount[attacker].filtered_alerts;
    }
  }
  {
    std::ifstream in(out / "episodes.tsv");
    std::string line;
    std::set<std::pair<std::string, std::string>> pairs;
    while (std::getline(in, line)) {
      std::istringstream f(line);
      std::string attacker, victim;
      std::getline(f, attacker, '\t');
      std::getline(f, victim, '\t');
      ++recount[attacker].episodes;
      pairs.insert({attacker, victim});
    }
    for (const auto& p : pairs) ++recount[p.first].es_count;
  }
  {
    std::ifstream in(out / "ess.txt");
    std::string line;
    while (std::getline(in, line)) ++recount[line.substr(0, line.find('\t'))].ess_count;
  }
  REQUIRE(run.team_stats.size() == recount.size());
  for (const auto& s : run.team_stats) {
    CAPTURE(s.team);
    CHECK(s.filtered_alerts == recount[s.team].filtered_alerts);
    CHECK(s.episodes == recount[s.team].episodes);
    CHECK(s.es_count == recount[s.team].es_count);
    CHECK(s.ess_count == recount[s.team].ess_count);
    CHECK(s.filtered_alerts <= s.raw_alerts);
    CHECK(s.ess_count >= s.es_count);
  }
}

TEST_CASE("repeated runs and both kernels write identical artifacts") {
  ScratchDir a("rep-a"), b("rep-b"), c("rep-c");
  auto cfg = fixture_config(a.path());
  run_pipeline(cfg);
  cfg.out_dir = b.path();
  run_pipeline(cfg);
  cfg.out_dir = c.path();
  cfg.exec = Execution::serial;
  run_pipeline(cfg);
  const auto first = snapshot(a.path());
  CHECK(first == snapshot(b.path()));
  CHECK(first == snapshot(c.path()));
}

TEST_CASE("stop-after writes only the stages that ran") {
  ScratchDir out("stop");
  auto cfg = fixture_config(out.path());
  cfg.stop_after = Stage::episodes;
  const auto run = run_pipeline(cfg);
  CHECK(run.completed == Stage::episodes);
  CHECK(std::filesystem::exists(out / "episodes.tsv"));
  CHECK_FALSE(std::filesystem::exists(out / "spdfa.txt"));
  CHECK_FALSE(std::filesystem::exists(out / "graphs"));

  // a later full run into the same directory, then a shorter one clears it
  cfg.stop_after = Stage::stats;
  run_pipeline(cfg);
  CHECK(std::filesystem::exists(out / "summary.json"));
  cfg.stop_after = Stage::ingest;
  run_pipeline(cfg);
  CHECK_FALSE(std::filesystem::exists(out / "summary.json"));
  CHECK_FALSE(std::filesystem::exists(out / "graphs"));
}

TEST_CASE("empty alert file succeeds with empty reports") {
  ScratchDir out("empty");
  const auto empty = out / "empty.json";
  std::ofstream(empty).close();
  auto cfg = fixture_config(out / "run");
  cfg.alerts = {empty};
  const auto run = run_pipeline(cfg);
  CHECK(run.completed == Stage::stats);
  CHECK(run.graphs.empty());
  CHECK(std::filesystem::exists(out / "run" / "ranking.tsv"));
  CHECK(slurp(out / "run" / "index.tsv").find("attack-graph-") == std::string::npos);
}

TEST_CASE("failures name the stage and leave nothing behind") {
  ScratchDir out("fail");
  auto cfg = fixture_config(out / "run");
  cfg.sig_map = out / "missing.tsv";
  try {
    run_pipeline(cfg);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::ingest);
  }
  CHECK(snapshot(out / "run").empty());

  cfg = fixture_config(out / "run");
  cfg.w = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.w = 150;
  cfg.split = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("split is a deterministic partition") {
  const auto [train, test] = split_indices(10, 0.8, 42);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
  std::set<std::size_t> all(train.begin(), train.end());
  all.insert(test.begin(), test.end());
  CHECK(all.size() == 10);
  CHECK(split_indices(10, 0.8, 42) == std::pair{train, test});
  CHECK(split_indices(10, 0.8, 43) != std::pair{train, test});
}

TEST_CASE("command line") {
  ScratchDir out("cli");
  const std::string fixture = kFixtures + "/golden_alerts.eve.json";
  CHECK(run_cli("--alerts " + fixture + " --out " + (out / "a").string()) == 0);
  CHECK(snapshot(out / "a") == snapshot(kGolden));
  CHECK(run_cli("--alerts " + fixture + " --out " + (out / "b").string() + " --serial --stop-after graphs") == 0);
  CHECK(std::filesystem::exists(out / "b" / "index.tsv"));
  CHECK_FALSE(std::filesystem::exists(out / "b" / "summary.json"));
  CHECK(run_cli("") != 0);
  CHECK(run_cli("--alerts /nonexistent/file.json") != 0);
  CHECK(run_cli("--alerts " + fixture + " --format xml") != 0);
  CHECK(run_cli("--alerts " + fixture + " --sig-map /nonexistent --out " + (out / "c").string()) == 2);
}

}  // TEST_SUITE
