#include <benchmark/benchmark.h>

#include <kces/kc_score.hpp>
#include <kces/kernel.hpp>
#include <kces/pseudolabel.hpp>
#include <kces/synthetic.hpp>

namespace {

kces::Graph bench_graph(std::size_t n) {
  kces::SbmConfig cfg;
  cfg.nodes = n;
  cfg.p_in = 8.0 / static_cast<double>(n);
  cfg.p_out = 1.0 / static_cast<double>(n);
  return kces::make_sbm(cfg);
}

void BM_gram(benchmark::State& state) {
  const auto g = bench_graph(static_cast<std::size_t>(state.range(0)));
  const auto xt = kces::aggregate_features(g);
  for (auto _ : state) benchmark::DoNotOptimize(kces::gram_matrix(xt, {.audit_spectrum = false}));
}
BENCHMARK(BM_gram)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void scores(benchmark::State& state, kces::ScoreMethod method) {
  const auto g = bench_graph(static_cast<std::size_t>(state.range(0)));
  const auto labels = kces::encode_labels(kces::kmeans_pseudo_labels(g, 2, 0), kces::LabelEncoding::one_hot);
  for (auto _ : state) benchmark::DoNotOptimize(kces::kc_scores_all(g, labels, method, 1));
  state.counters["edges"] = static_cast<double>(g.num_edges());
}

void BM_scores_fast(benchmark::State& state) { scores(state, kces::ScoreMethod::fast); }
void BM_scores_naive(benchmark::State& state) { scores(state, kces::ScoreMethod::naive); }
BENCHMARK(BM_scores_fast)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scores_naive)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_single_edge_fast(benchmark::State& state) {
  const auto g = bench_graph(static_cast<std::size_t>(state.range(0)));
  const auto labels = kces::encode_labels(kces::kmeans_pseudo_labels(g, 2, 0), kces::LabelEncoding::one_hot);
  const kces::FastScoringCache cache(g, labels);
  const auto e = g.edges().front();
  for (auto _ : state) benchmark::DoNotOptimize(cache.score(e.u, e.v));
}
BENCHMARK(BM_single_edge_fast)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
