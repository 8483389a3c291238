#include <benchmark/benchmark.h>

#include <random>

#include "idsgan/gan.hpp"
#include "idsgan/model.hpp"
#include "idsgan/ops.hpp"

namespace {

idsgan::Tensor uniform(idsgan::Shape shape, std::uint64_t seed, bool requires_grad = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(idsgan::shape_size(shape));
  for (double& x : v) x = dist(rng);
  return idsgan::Tensor(std::move(shape), std::move(v), requires_grad);
}

void BM_Conv1d(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto x = uniform({128, len, 32}, 1);
  const auto k = uniform({64, 32, 3}, 2);
  const auto b = uniform({64}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(idsgan::ops::conv1d(x, k, b));
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_Conv1d)->Arg(30)->Arg(78);

void BM_ClassifierForward(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto model = idsgan::nn::build_cnn_attention(len, len == 30 ? 5 : 1, 0);
  const auto x = uniform({128, len, 1}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(idsgan::nn::forward(model, x, false, 0));
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_ClassifierForward)->Arg(30)->Arg(78);

void BM_ClassifierTrainStep(benchmark::State& state) {
  const auto model = idsgan::nn::build_cnn_attention(30, 5, 0);
  const auto x = uniform({128, 30, 1}, 5);
  std::vector<int> labels(128);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 5);
  const auto targets = idsgan::ops::one_hot(labels, 5);
  for (auto _ : state) {
    idsgan::Tape tape;
    idsgan::Tensor loss;
    {
      idsgan::TapeScope scope(tape);
      loss = idsgan::ops::categorical_cross_entropy(idsgan::nn::forward(model, x, true, 1),
                                                    targets);
    }
    tape.backward(loss);
    benchmark::DoNotOptimize(loss.item());
  }
}
BENCHMARK(BM_ClassifierTrainStep);

void BM_GenerateSynthetic(benchmark::State& state) {
  const auto bundle = idsgan::gan::make_gan(78, idsgan::gan::GanConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(idsgan::gan::generate_synthetic(bundle, 1024, 1));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_GenerateSynthetic);

}  // namespace

BENCHMARK_MAIN();
