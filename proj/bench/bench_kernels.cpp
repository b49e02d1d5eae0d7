// Serial reference versus OpenMP path for each parallel kernel.
// Argument 0 selects the serial path, 1 the parallel one.

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "topicbench/cluster.hpp"
#include "topicbench/coherence.hpp"
#include "topicbench/kernels.hpp"
#include "topicbench/lda.hpp"

using namespace topicbench;

namespace {

Exec exec_of(const benchmark::State& state) {
    return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

Matrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    Matrix m(n, d);
    for (auto& x : m.data()) x = g(rng);
    return m;
}

DocTermMatrix random_counts(std::size_t docs, std::size_t terms, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    Matrix m(docs, terms);
    for (auto& x : m.data())
        if (u(rng) < density) x = 1 + std::floor(u(rng) * 4);
    return DocTermMatrix::from_dense(m, MatrixKind::counts);
}

void BM_Knn(benchmark::State& state) {
    const auto pts = random_points(2000, 16, 1);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::brute_force_knn(pts, 15, exec_of(state)));
}

void BM_SparseDense(benchmark::State& state) {
    const auto a = random_counts(4000, 2000, 0.01, 2);
    const auto x = random_points(2000, 32, 3);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::sparse_dense_product(a, x, exec_of(state)));
}

void BM_PrimMst(benchmark::State& state) {
    const auto pts = random_points(2000, 5, 4);
    const auto core = core_distances(pts, 10, Exec::parallel);
    for (auto _ : state) benchmark::DoNotOptimize(mst_mutual_reachability(pts, core, exec_of(state)));
}

void BM_LdaBatchStep(benchmark::State& state) {
    const auto counts = random_counts(1000, 500, 0.05, 5);
    LdaConfig cfg;
    cfg.num_topics = 10;
    cfg.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(fit_batch(counts, cfg, 1, {}, exec_of(state)));
}

void BM_CoherenceCounting(benchmark::State& state) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> term(0, 499);
    std::vector<std::vector<std::string>> docs(2000);
    for (auto& d : docs)
        for (int i = 0; i < 150; ++i) d.push_back("t" + std::to_string(term(rng)));
    const auto corpus = corpus_from_tokens(docs);
    std::vector<std::string> words;
    for (int i = 0; i < 50; ++i) words.push_back("t" + std::to_string(i));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            count_contexts(corpus, words, ContextMode::window, 110, exec_of(state)));
}

} // namespace

BENCHMARK(BM_Knn)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SparseDense)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PrimMst)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LdaBatchStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoherenceCounting)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
