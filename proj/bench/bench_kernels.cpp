// Serial reference vs OpenMP kernels on synthetic workloads.
// Run: ./build/bench/sage_bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <random>

#include "sage/pipeline.hpp"
#include "support/generators.hpp"

using namespace sage;
namespace st = sage::testing;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "openmp"); }

std::map<PairKey, std::vector<Alert>> many_pairs(std::size_t pairs, std::size_t per_pair) {
  std::map<PairKey, std::vector<Alert>> out;
  for (std::size_t p = 0; p < pairs; ++p) {
    std::mt19937_64 rng(p);
    auto alerts = st::random_pair_alerts(rng, per_pair, 90.0);
    PairKey key{"10.0.1." + std::to_string(p % 250), "10.0.0." + std::to_string(p / 250)};
    for (auto& a : alerts) {
      a.attacker = key.first;
      a.victim = key.second;
    }
    out.emplace(std::move(key), std::move(alerts));
  }
  return out;
}

const std::vector<std::vector<Symbol>>& planted_corpus() {
  static const auto corpus = st::PlantedAutomaton{}.corpus(1, 4000);
  return corpus;
}

const Spdfa& planted_model() {
  static const auto model = learn_spdfa(build_suffix_tree(planted_corpus()));
  return model;
}

// Episode sequences whose symbols come from the planted automaton, so the
// replay and graph kernels see a realistic mix of in-model states.
const std::vector<EpisodeSequence>& planted_sequences() {
  static const auto seqs = [] {
    std::vector<EpisodeSequence> out;
    const auto& corpus = planted_corpus();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      EpisodeSequence es{"t" + std::to_string(i % 8), "v" + std::to_string(i % 20), {}};
      double t = 0;
      for (const auto& sym : corpus[i]) {
        es.episodes.push_back(st::make_episode(t, t + 5, sym.mcat, sym.service, es.attacker, es.victim));
        t += 60;
      }
      out.push_back(std::move(es));
    }
    return out;
  }();
  return seqs;
}

void BM_AggregateEpisodes(benchmark::State& state) {
  static const auto pairs = many_pairs(500, 200);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_all(pairs, 150.0, exec_of(state)));
  label(state);
}

void BM_LearnSpdfa(benchmark::State& state) {
  static const auto tree = build_suffix_tree(planted_corpus());
  for (auto _ : state) benchmark::DoNotOptimize(learn_spdfa(tree, {}, exec_of(state)));
  label(state);
}

void BM_Log2Probabilities(benchmark::State& state) {
  const auto& corpus = planted_corpus();
  const auto& model = planted_model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(log2_probabilities(model, corpus, Smoothing::add_one, exec_of(state)));
  }
  label(state);
}

void BM_BuildEsqs(benchmark::State& state) {
  const auto& seqs = planted_sequences();
  for (auto _ : state) benchmark::DoNotOptimize(build_esqs(seqs, planted_model(), exec_of(state)));
  label(state);
}

void BM_ExtractGraphs(benchmark::State& state) {
  const auto& seqs = planted_sequences();
  static const auto esqs = build_esqs(seqs, planted_model(), Execution::serial);
  static const auto keys = find_objectives(esqs);
  TeamClock clock;
  for (const auto& es : seqs) clock.emplace(es.attacker, st::at_seconds(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract_all(keys, esqs, clock, planted_model(), exec_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_AggregateEpisodes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LearnSpdfa)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Log2Probabilities)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildEsqs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractGraphs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
