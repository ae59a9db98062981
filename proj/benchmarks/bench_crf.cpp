#include <benchmark/benchmark.h>

#include <random>

#include "eed/crf.hpp"

using namespace eed;

namespace {

CrfModel bench_model(size_t num_attrs) {
  CrfModel model({}, TransitionMask::bioes());
  std::mt19937_64 rng(99);
  for (size_t i = 0; i < num_attrs; ++i) model.intern_attr("a" + std::to_string(i));
  for (double& w : model.weights())
    w = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  return model;
}

Lattice bench_lattice(const CrfModel& model, size_t length) {
  std::mt19937_64 rng(7);
  Lattice lat;
  lat.attrs.resize(length);
  for (auto& pos : lat.attrs)
    for (int i = 0; i < 25; ++i)
      pos.push_back(static_cast<int>(rng() % model.num_attrs()));
  return lat;
}

void BM_ForwardBackward(benchmark::State& state) {
  const auto model = bench_model(5000);
  const auto lat = bench_lattice(model, static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(log_forward_backward(model, lat));
}

void BM_Viterbi(benchmark::State& state) {
  const auto model = bench_model(5000);
  const auto lat = bench_lattice(model, static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(viterbi(model, lat));
}

void BM_ConstrainedMarginal(benchmark::State& state) {
  const auto model = bench_model(5000);
  const auto lat = bench_lattice(model, static_cast<size_t>(state.range(0)));
  const std::vector<BioesTag> constraint{BioesTag::B, BioesTag::E};
  for (auto _ : state)
    benchmark::DoNotOptimize(constrained_marginal(model, lat, 1, constraint));
}

}  // namespace

BENCHMARK(BM_ForwardBackward)->Arg(16)->Arg(64)->Arg(128);
BENCHMARK(BM_Viterbi)->Arg(16)->Arg(64)->Arg(128);
BENCHMARK(BM_ConstrainedMarginal)->Arg(16)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
