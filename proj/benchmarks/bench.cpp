#include <benchmark/benchmark.h>

#include "apiguard/detector.hpp"
#include "apiguard/similarity.hpp"
#include "support/corpus.hpp"
#include "support/random_groum.hpp"

using namespace apiguard;
using namespace apiguard::testsupport;

static void BM_sim(benchmark::State& state) {
    Rng rng(1);
    std::vector<Groum> corpus;
    for (int i = 0; i < 64; ++i) corpus.push_back(random_groum(rng, static_cast<int>(state.range(0))));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim(corpus[i % 64], corpus[(i + 17) % 64]));
        ++i;
    }
}
BENCHMARK(BM_sim)->Arg(4)->Arg(8)->Arg(16);

static void BM_sim_bags(benchmark::State& state) {
    Rng rng(2);
    std::vector<ElementBag> bags;
    for (int i = 0; i < 64; ++i) bags.push_back(elements(random_groum(rng, 8)));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim_bags(bags[i % 64], bags[(i + 17) % 64]));
        ++i;
    }
}
BENCHMARK(BM_sim_bags);

static void BM_fitness_set(benchmark::State& state) {
    SelfCorpus corpus = make_session_corpus(30, 1);
    GAConfig cfg;
    MutationVocab vocab = MutationVocab::from(corpus);
    std::vector<ElementBag> bags;
    for (const auto& s : corpus.signatures) bags.push_back(elements(s.groum));
    Rng rng(3);
    DetectorSet set;
    while (set.detectors.size() < static_cast<std::size_t>(state.range(0)))
        set.detectors.push_back(
            make_detector(corpus.signatures[rng.nextIndex(corpus.signatures.size())], -1, vocab,
                          bags, rng));
    for (auto _ : state) benchmark::DoNotOptimize(fitness_set(set, corpus, cfg));
}
BENCHMARK(BM_fitness_set)->Arg(10)->Arg(50);

static void BM_evolve_generation(benchmark::State& state) {
    SelfCorpus corpus = make_session_corpus(30, 1);
    GAConfig cfg;
    cfg.setSize = static_cast<int>(state.range(0));
    cfg.populationSize = 10;
    cfg.generations = 1;
    cfg.rngSeed = 4;
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_detectors(corpus, GenerationStrategy::NoCluster, cfg));
}
BENCHMARK(BM_evolve_generation)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
