#include <benchmark/benchmark.h>

#include <random>

#include "eed/brown.hpp"

using namespace eed;

namespace {

std::vector<std::vector<std::string>> bench_corpus(size_t vocab, size_t sentences) {
  std::mt19937_64 rng(5);
  std::vector<std::vector<std::string>> corpus;
  for (size_t s = 0; s < sentences; ++s) {
    std::vector<std::string> sent;
    const size_t len = 6 + rng() % 10;
    for (size_t t = 0; t < len; ++t) sent.push_back("w" + std::to_string(rng() % vocab));
    corpus.push_back(std::move(sent));
  }
  return corpus;
}

void BM_BrownCluster(benchmark::State& state) {
  const auto corpus = bench_corpus(static_cast<size_t>(state.range(0)), 400);
  BrownOptions opt;
  opt.num_clusters = 16;
  for (auto _ : state) benchmark::DoNotOptimize(brown_cluster(corpus, opt));
}

}  // namespace

BENCHMARK(BM_BrownCluster)->Arg(64)->Arg(256)->Arg(512);
