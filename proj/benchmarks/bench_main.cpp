#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "celldesc/aucell.hpp"
#include "celldesc/ppr.hpp"
#include "celldesc/similarity.hpp"
#include "celldesc/text_metrics.hpp"

namespace {

std::string node_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "N%05zu", i);
    return buf;
}

// Random attachment tree: connected, heavy-tailed degrees, one component.
celldesc::OntologyGraph random_tree(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::ostringstream edges;
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        edges << node_name(i) << '\t' << node_name(pick(rng)) << '\n';
    }
    std::istringstream in(edges.str());
    return celldesc::OntologyGraph::from_edge_list(in);
}

void bench_ppr(benchmark::State& state) {
    const auto graph = random_tree(static_cast<std::size_t>(state.range(0)), 1);
    const celldesc::PprConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(celldesc::personalized_pagerank(graph, 0, config));
    }
}
BENCHMARK(bench_ppr)->Arg(64)->Arg(256)->Arg(1024);

void bench_similarity_row(benchmark::State& state) {
    const auto graph = random_tree(static_cast<std::size_t>(state.range(0)), 2);
    const celldesc::PprConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(celldesc::similarity_row(graph, 0, config));
    }
}
BENCHMARK(bench_similarity_row)->Arg(256)->Arg(1024);

void bench_similarity_matrix_serial(benchmark::State& state) {
    const auto graph = random_tree(static_cast<std::size_t>(state.range(0)), 3);
    const celldesc::PprConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(celldesc::similarity_matrix(graph, config, false, 1));
    }
}
BENCHMARK(bench_similarity_matrix_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void bench_similarity_matrix_parallel(benchmark::State& state) {
    const auto graph = random_tree(static_cast<std::size_t>(state.range(0)), 3);
    const celldesc::PprConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(celldesc::similarity_matrix(graph, config, false, 0));
    }
}
BENCHMARK(bench_similarity_matrix_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

celldesc::ExpressionMatrix random_expression(std::size_t cells, std::size_t genes,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value(0.0, 100.0);
    celldesc::ExpressionMatrix m;
    for (std::size_t g = 0; g < genes; ++g) m.genes.push_back("G" + std::to_string(g));
    m.row_ptr.push_back(0);
    for (std::size_t c = 0; c < cells; ++c) {
        m.cells.push_back("c" + std::to_string(c));
        for (std::size_t g = 0; g < genes; ++g) {
            if ((rng() & 3u) == 0) continue; // ~25% dropout
            m.col_idx.push_back(g);
            m.values.push_back(value(rng));
        }
        m.row_ptr.push_back(m.col_idx.size());
    }
    m.validate();
    return m;
}

void bench_aucell(benchmark::State& state) {
    const std::size_t genes = static_cast<std::size_t>(state.range(0));
    const auto expr = random_expression(1, genes, 4);
    celldesc::GeneSet set;
    set.id = "BENCH";
    for (std::size_t g = 0; g < genes; g += 10) set.genes.push_back("G" + std::to_string(g));
    std::sort(set.genes.begin(), set.genes.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(celldesc::aucell_score(expr, 0, set, 0.05));
    }
}
BENCHMARK(bench_aucell)->Arg(2000)->Arg(20000);

std::vector<std::string> random_sentence(std::size_t len, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> word(0, 199);
    std::vector<std::string> out(len);
    for (auto& t : out) t = "tok" + std::to_string(word(rng));
    return out;
}

void bench_bleu(benchmark::State& state) {
    const auto pred = random_sentence(static_cast<std::size_t>(state.range(0)), 5);
    const auto ref = random_sentence(static_cast<std::size_t>(state.range(0)), 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(celldesc::sentence_bleu(pred, ref, 4));
    }
}
BENCHMARK(bench_bleu)->Arg(30)->Arg(120);

void bench_rouge_l(benchmark::State& state) {
    const auto pred = random_sentence(static_cast<std::size_t>(state.range(0)), 7);
    const auto ref = random_sentence(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(celldesc::rouge_l(pred, ref, 1.2));
    }
}
BENCHMARK(bench_rouge_l)->Arg(30)->Arg(120);

} // namespace

BENCHMARK_MAIN();
