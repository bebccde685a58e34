#include <benchmark/benchmark.h>

#include "ftg/expr.hpp"

using namespace ftg;

namespace {

std::vector<expr_tree> sample_trees(std::size_t n)
{
    rng_type rng(1);
    std::vector<expr_tree> trees;
    for (std::size_t i = 0; i < n; ++i) {
        trees.push_back(generate_composition(operator_set::standard(), gen_params {}, rng));
    }
    return trees;
}

void eval_single(benchmark::State& state)
{
    auto const trees = sample_trees(256);
    double x = 0.3;
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_tree(trees[i++ % trees.size()], std::span(&x, 1)));
    }
}
BENCHMARK(eval_single);

void eval_batch_points(benchmark::State& state)
{
    auto const trees = sample_trees(256);
    std::vector<double> points(static_cast<std::size_t>(state.range(0)));
    for (std::size_t k = 0; k < points.size(); ++k) {
        points[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(points.size());
    }
    std::vector<double> out(points.size());
    std::size_t i = 0;
    for (auto _ : state) {
        eval_batch(trees[i++ % trees.size()], points, 1, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(eval_batch_points)->Arg(20)->Arg(1000);

void generate(benchmark::State& state)
{
    rng_type rng(2);
    auto const ops = operator_set::standard();
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_composition(ops, gen_params {}, rng));
    }
}
BENCHMARK(generate);

void crossover(benchmark::State& state)
{
    auto const trees = sample_trees(256);
    rng_type rng(3);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(subtree_crossover(trees[i % trees.size()], trees[(i + 1) % trees.size()], rng));
        ++i;
    }
}
BENCHMARK(crossover);

} // namespace
