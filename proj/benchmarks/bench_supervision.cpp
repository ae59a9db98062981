#include <benchmark/benchmark.h>

#include <filesystem>

#include "eed/supervision.hpp"
#include "eed/synth.hpp"

using namespace eed;

namespace {

struct Corpus {
  std::vector<Post> posts;
  std::vector<KBEntity> kb;
  SupervisionConfig cfg;
};

const Corpus& bench_corpus() {
  static Corpus c = [] {
    const auto dir = std::filesystem::temp_directory_path() / "eed_bench_synth";
    std::filesystem::remove_all(dir);
    SynthConfig synth;
    synth.chatter_posts = 200;
    const auto paths = generate_synthetic_corpus(3, synth, dir);
    Corpus out;
    out.posts = load_posts(paths.posts);
    out.kb = load_kb(paths.kb);
    const auto plan = load_plan(paths.plan);
    out.cfg.base_window = plan.base_window;
    return out;
  }();
  return c;
}

void BM_BuildDataset(benchmark::State& state) {
  const auto& c = bench_corpus();
  for (auto _ : state) benchmark::DoNotOptimize(build_dataset(c.kb, c.posts, c.cfg));
}

void BM_CollectCandidates(benchmark::State& state) {
  const auto& c = bench_corpus();
  for (auto _ : state)
    benchmark::DoNotOptimize(collect_candidates(c.kb, c.posts, c.cfg));
}

}  // namespace

BENCHMARK(BM_BuildDataset)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CollectCandidates)->Unit(benchmark::kMillisecond);
