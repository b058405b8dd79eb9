#include "sage/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sage {

namespace fs = std::filesystem;

std::string_view stage_name(Stage stage) noexcept {
  switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::episodes: return "episodes";
    case Stage::learn: return "learn";
    case Stage::graphs: return "graphs";
    case Stage::stats: return "stats";
  }
  return "stats";
}

std::optional<Stage> parse_stage_name(std::string_view text) noexcept {
  for (auto s : {Stage::ingest, Stage::episodes, Stage::learn, Stage::graphs, Stage::stats}) {
    if (stage_name(s) == text) return s;
  }
  return std::nullopt;
}

void PipelineConfig::validate() const {
  if (!(t > 0)) throw std::invalid_argument("t must be positive");
  if (!(w > 0)) throw std::invalid_argument("w must be positive");
  if (!(split > 0 && split < 1)) throw std::invalid_argument("split must lie in (0, 1)");
  learn.validate();
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                           double train_fraction,
                                                                           std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  // Fisher-Yates with rejection sampling, so the permutation does not depend
  // on the standard library's distribution implementation.
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t range = i;
    const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % range);
    std::uint64_t draw;
    do {
      draw = rng();
    } while (draw >= limit);
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(draw % range)]);
  }
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  return {std::vector<std::size_t>(idx.begin(), idx.begin() + static_cast<long>(n_train)),
          std::vector<std::size_t>(idx.begin() + static_cast<long>(n_train), idx.end())};
}

PerplexityReport evaluate_perplexity(std::span<const std::vector<Symbol>> corpus, double split,
                                     std::uint64_t seed, const LearnParams& params, Execution exec) {
  PerplexityReport report;
  auto [train_idx, test_idx] = split_indices(corpus.size(), split, seed);
  std::vector<std::vector<Symbol>> train, test;
  for (auto i : train_idx) train.push_back(corpus[i]);
  for (auto i : test_idx) test.push_back(corpus[i]);
  report.train_size = train.size();
  report.test_size = test.size();
  if (train.empty()) return report;

  const auto tree = PrefixTree::build(train);
  const auto chain = MarkovChain::learn(train);
  const auto model = learn_spdfa(tree, params, exec);
  auto eval = [&](const std::vector<std::vector<Symbol>>& set) {
    return std::array<double, 3>{perplexity(tree, set, Smoothing::add_one, exec),
                                 perplexity(chain, set, Smoothing::add_one, exec),
                                 perplexity(model, set, Smoothing::add_one, exec)};
  };
  report.train = eval(train);
  if (!test.empty()) report.test = eval(test);
  return report;
}

namespace {

template <class F>
auto in_stage(Stage stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

TeamClock first_alerts(std::span<const Alert> alerts) {
  TeamClock clock;
  for (const auto& a : alerts) {
    auto [it, inserted] = clock.emplace(a.attacker, a.timestamp);
    if (!inserted && a.timestamp < it->second) it->second = a.timestamp;
  }
  return clock;
}

std::vector<std::vector<Symbol>> symbol_corpus(std::span<const EpisodeSubSequence> subsequences) {
  std::vector<std::vector<Symbol>> corpus;
  corpus.reserve(subsequences.size());
  for (const auto& ess : subsequences) corpus.push_back(to_symbols(ess));
  return corpus;
}

}  // namespace

PipelineRun compute_pipeline(const PipelineConfig& cfg, std::vector<Alert> mapped, ParseStats stats) {
  in_stage(Stage::ingest, [&] { cfg.validate(); });
  PipelineRun run;
  run.parse_stats = stats;
  run.mapped = std::move(mapped);

  in_stage(Stage::ingest, [&] {
    sort_by_time(run.mapped);
    run.filtered = filter_duplicates(run.mapped, cfg.t);
  });
  run.completed = Stage::ingest;
  if (cfg.stop_after == Stage::ingest) return run;

  in_stage(Stage::episodes, [&] {
    const auto pairs = group_by_pair(run.filtered);
    auto per_pair = aggregate_all(pairs, cfg.w, cfg.exec);
    std::vector<Episode> all;
    for (auto& eps : per_pair) std::move(eps.begin(), eps.end(), std::back_inserter(all));
    run.sequences = build_sequences(all);
    for (const auto& es : run.sequences) {
      auto parts = partition_subsequences(es);
      std::move(parts.begin(), parts.end(), std::back_inserter(run.subsequences));
    }
  });
  run.completed = Stage::episodes;
  if (cfg.stop_after == Stage::episodes) return run;

  in_stage(Stage::learn, [&] {
    const auto corpus = symbol_corpus(run.subsequences);
    run.model = learn_spdfa(PrefixTree::build(corpus), cfg.learn, cfg.exec);
    run.model.check_invariants();
  });
  run.completed = Stage::learn;
  if (cfg.stop_after == Stage::learn) return run;

  in_stage(Stage::graphs, [&] {
    run.esqs = build_esqs(run.sequences, run.model, cfg.exec);
    run.objectives = find_objectives(run.esqs);
    run.graphs = extract_all(run.objectives, run.esqs, first_alerts(run.filtered), run.model, cfg.exec);
  });
  run.completed = Stage::graphs;
  if (cfg.stop_after == Stage::graphs) return run;

  in_stage(Stage::stats, [&] {
    run.team_stats = workload_stats(
        {run.mapped, run.filtered, run.sequences, run.subsequences, run.graphs});
    std::size_t severe = 0, medium = 0;
    for (const auto& ag : run.graphs) {
      for (const auto& v : ag.vertices) {
        severe += v.severity() == Severity::High;
        medium += v.severity() == Severity::Med;
      }
    }
    if (severe > 0 && medium > 0) run.ranking = rank_teams(run.graphs);
    run.shorter_repeat = shorter_repeat_ratio(run.graphs);
    const auto corpus = symbol_corpus(run.subsequences);
    run.perplexity = evaluate_perplexity(corpus, cfg.split, cfg.seed, cfg.learn, cfg.exec);
  });
  run.completed = Stage::stats;
  return run;
}

PipelineRun compute_pipeline(const PipelineConfig& cfg) {
  auto [mapped, stats] = in_stage(Stage::ingest, [&] {
    cfg.validate();
    const auto mapping = MappingConfig::from_files(cfg.sig_map, cfg.port_map);
    auto parsed = parse_alert_files(cfg.alerts, cfg.format, cfg.exec);
    std::vector<Alert> out;
    out.reserve(parsed.alerts.size());
    for (const auto& raw : parsed.alerts) out.push_back(map_alert(raw, mapping));
    return std::make_pair(std::move(out), parsed.stats);
  });
  return compute_pipeline(cfg, std::move(mapped), stats);
}

namespace {

const char* kTopLevelArtifacts[] = {"alerts.tsv",  "episodes.tsv",   "ess.txt",
                                    "spdfa.txt",   "spdfa.dot",      "index.tsv",
                                    "stats.tsv",   "ranking.tsv",    "perplexity.tsv",
                                    "summary.json"};

void clear_previous(const fs::path& dir) {
  for (const char* name : kTopLevelArtifacts) fs::remove(dir / name);
  const auto graphs = dir / "graphs";
  if (fs::is_directory(graphs)) {
    std::vector<fs::path> stale;
    for (const auto& entry : fs::directory_iterator(graphs)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("attack-graph-", 0) == 0 && entry.path().extension() == ".dot") {
        stale.push_back(entry.path());
      }
    }
    for (const auto& p : stale) fs::remove(p);
    if (fs::is_empty(graphs)) fs::remove(graphs);
  }
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const fs::path& relative, const std::function<void(std::ostream&)>& body) {
    const auto path = dir_ / relative;
    if (!fs::exists(path.parent_path())) {
      fs::create_directories(path.parent_path());
      created_dirs_.push_back(path.parent_path());
    }
    written_.push_back(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
  }

  void rollback() noexcept {
    std::error_code ec;
    for (auto it = written_.rbegin(); it != written_.rend(); ++it) fs::remove(*it, ec);
    for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it) {
      if (fs::is_empty(*it, ec)) fs::remove(*it, ec);
    }
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  std::vector<fs::path> created_dirs_;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void write_alerts(std::ostream& out, const PipelineRun& run) {
  out << "# records=" << run.parse_stats.total << " parsed=" << run.parse_stats.parsed
      << " skipped=" << run.parse_stats.skipped << " ignored=" << run.parse_stats.ignored
      << " mapped=" << run.mapped.size() << " filtered=" << run.filtered.size() << '\n';
  out << "timestamp\tattacker\tvictim\tmcat\ttserv\n";
  for (const auto& a : run.filtered) {
    out << format_timestamp(a.timestamp) << '\t' << a.attacker << '\t' << a.victim << '\t'
        << acronym(a.mcat) << '\t' << a.tserv << '\n';
  }
}

void write_perplexity(std::ostream& out, const PipelineConfig& cfg, const PerplexityReport& r) {
  out << "# split=" << fixed(cfg.split, 2) << " seed=" << cfg.seed << " train=" << r.train_size
      << " test=" << r.test_size << " smoothing=add-one\n";
  out << "set\tsuffix_tree\tmarkov_chain\tspdfa\n";
  auto row = [&](const char* name, const std::optional<std::array<double, 3>>& v) {
    out << name;
    for (int i = 0; i < 3; ++i) out << '\t' << (v ? fixed((*v)[static_cast<std::size_t>(i)], 4) : "n/a");
    out << '\n';
  };
  row("train", r.train);
  row("test", r.test);
}

nlohmann::ordered_json summary_json(const PipelineConfig& cfg, const PipelineRun& run) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["config"] = {{"format", cfg.format == AlertFormat::csv ? "csv" : "eve-json"},
                 {"t", cfg.t},
                 {"w", cfg.w},
                 {"symbol_count", cfg.learn.symbol_count},
                 {"state_count", cfg.learn.state_count},
                 {"sink_count", cfg.learn.sink_count},
                 {"alpha", cfg.learn.alpha},
                 {"split", cfg.split},
                 {"seed", cfg.seed}};
  j["parse"] = {{"records", run.parse_stats.total},
                {"parsed", run.parse_stats.parsed},
                {"skipped", run.parse_stats.skipped},
                {"ignored", run.parse_stats.ignored}};

  std::size_t episodes = 0;
  for (const auto& es : run.sequences) episodes += es.episodes.size();
  std::set<VertexId> objective_variants;
  std::set<std::string> victims;
  double simplicity_sum = 0.0;
  std::size_t simplicity_n = 0;
  std::size_t vertex_sum = 0;
  for (const auto& ag : run.graphs) {
    victims.insert(ag.key.victim);
    vertex_sum += ag.vertices.size();
    for (const auto& v : ag.vertices) {
      if (v.is_objective_variant) objective_variants.insert(v.id);
    }
    if (auto s = simplicity(ag)) {
      simplicity_sum += *s;
      ++simplicity_n;
    }
  }
  std::size_t sinks = 0;
  for (const auto& s : run.model.states()) sinks += s.is_sink;

  j["totals"] = {{"alerts_mapped", run.mapped.size()},
                 {"alerts_filtered", run.filtered.size()},
                 {"episodes", episodes},
                 {"es_esq", run.sequences.size()},
                 {"ess", run.subsequences.size()},
                 {"states", run.model.size()},
                 {"sink_states", sinks},
                 {"attack_graphs", run.graphs.size()},
                 {"objective_keys", run.objectives.size()},
                 {"objectives", objective_variants.size()},
                 {"victims", victims.size()}};
  auto opt = [](std::optional<double> v) -> ordered_json { return v ? ordered_json(*v) : ordered_json(); };
  j["graphs"] = {
      {"mean_simplicity", opt(simplicity_n ? std::optional(simplicity_sum / simplicity_n) : std::nullopt)},
      {"mean_vertices",
       opt(run.graphs.empty() ? std::nullopt
                              : std::optional(static_cast<double>(vertex_sum) / run.graphs.size()))},
      {"shorter_repeat_percent", opt(run.shorter_repeat)},
      {"shorter_repeat_definition",
       "consecutive attempts of one team at one objective; later path strictly fewer vertices"}};

  ordered_json teams = ordered_json::array();
  for (const auto& s : run.team_stats) {
    teams.push_back({{"team", s.team},
                     {"alerts_raw", s.raw_alerts},
                     {"alerts_filtered", s.filtered_alerts},
                     {"episodes", s.episodes},
                     {"es_esq", s.es_count},
                     {"ess", s.ess_count},
                     {"ags", s.ag_count}});
  }
  j["workload"] = teams;

  ordered_json ranking = ordered_json::array();
  for (const auto& s : run.ranking) {
    ranking.push_back({{"team", s.team},
                       {"severe_vertices", s.severe_vertices},
                       {"severe_total", s.severe_total},
                       {"severe_percent", s.severe_percent},
                       {"medium_vertices", s.medium_vertices},
                       {"medium_total", s.medium_total},
                       {"medium_percent", s.medium_percent},
                       {"score", std::round(s.score * 100.0) / 100.0}});
  }
  j["ranking"] = ranking;

  auto arr = [&](const std::optional<std::array<double, 3>>& v) -> ordered_json {
    if (!v) return ordered_json();
    return {{"suffix_tree", (*v)[0]}, {"markov_chain", (*v)[1]}, {"spdfa", (*v)[2]}};
  };
  j["perplexity"] = {{"train_size", run.perplexity.train_size},
                     {"test_size", run.perplexity.test_size},
                     {"train", arr(run.perplexity.train)},
                     {"test", arr(run.perplexity.test)}};
  return j;
}

}  // namespace

PipelineRun run_pipeline(const PipelineConfig& cfg) {
  if (cfg.out_dir.empty()) throw StageError(Stage::ingest, "no output directory configured");
  ArtifactWriter writer(cfg.out_dir);
  try {
    fs::create_directories(cfg.out_dir);
    clear_previous(cfg.out_dir);
    PipelineRun run = compute_pipeline(cfg);

    in_stage(Stage::ingest, [&] { writer.write("alerts.tsv", [&](auto& o) { write_alerts(o, run); }); });
    if (cfg.stop_after == Stage::ingest) return run;

    in_stage(Stage::episodes, [&] {
      writer.write("episodes.tsv", [&](auto& o) { write_episode_dump(o, run.sequences); });
      writer.write("ess.txt", [&](auto& o) { write_symbol_corpus(o, run.subsequences); });
    });
    if (cfg.stop_after == Stage::episodes) return run;

    in_stage(Stage::learn, [&] {
      writer.write("spdfa.txt", [&](auto& o) { write_spdfa(o, run.model); });
      writer.write("spdfa.dot", [&](auto& o) { write_spdfa_dot(o, run.model); });
    });
    if (cfg.stop_after == Stage::learn) return run;

    in_stage(Stage::graphs, [&] {
      std::set<std::string> teams;
      for (const auto& a : run.filtered) teams.insert(a.attacker);
      const auto style = StyleConfig::for_teams(teams);
      for (const auto& ag : run.graphs) {
        writer.write(fs::path("graphs") / dot_file_name(ag.key), [&](auto& o) { emit_dot(o, ag, style); });
      }
      writer.write("index.tsv", [&](auto& o) { write_index(o, run.graphs); });
    });
    if (cfg.stop_after == Stage::graphs) return run;

    in_stage(Stage::stats, [&] {
      writer.write("stats.tsv", [&](auto& o) { write_stats_report(o, run.team_stats); });
      writer.write("ranking.tsv", [&](auto& o) {
        o << "# shorter_repeat="
          << (run.shorter_repeat ? fixed(*run.shorter_repeat, 1) + "%" : std::string("n/a"))
          << " over consecutive attempts of one team at one objective\n";
        if (run.ranking.empty()) o << "# no High and Med severity vertices to rank against\n";
        write_ranking_report(o, run.ranking);
      });
      writer.write("perplexity.tsv", [&](auto& o) { write_perplexity(o, cfg, run.perplexity); });
      writer.write("summary.json", [&](auto& o) { o << summary_json(cfg, run).dump(2) << '\n'; });
    });
    return run;
  } catch (const StageError&) {
    writer.rollback();
    throw;
  } catch (const std::exception& e) {
    writer.rollback();
    throw StageError(Stage::ingest, e.what());
  }
}

}  // namespace sage
