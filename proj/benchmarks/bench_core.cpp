#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "dhp/dhp_model.hpp"
#include "dhp/kernels.hpp"
#include "dhp/random.hpp"
#include "dhp/simulate.hpp"

using namespace dhp;

namespace {

EventSequence uniform_sequence(std::size_t marks, std::size_t n, double horizon) {
  Xoshiro256 rng(1);
  std::vector<Event> events(n);
  for (auto& e : events) e = {rng.uniform() * horizon, static_cast<std::size_t>(rng.index(marks))};
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  return EventSequence(std::move(events), marks, horizon);
}

DhpModel make_model(KernelFamily family, std::size_t marks, double horizon) {
  auto model = DhpModel::create({marks, KernelSpec{family, 2.0}, {3, 2, 8}, false}, horizon, 7);
  model.set_mu(std::vector<double>(marks, 0.3));
  Matrix alpha(marks, marks);
  std::fill(alpha.data().begin(), alpha.data().end(), family == KernelFamily::PowerLaw ? 0.6 : 0.2);
  model.set_alpha(alpha);
  model.set_beta(std::vector<double>(marks, 1.0));
  return model;
}

}  // namespace

static void BM_KernelValue(benchmark::State& state) {
  const KernelSpec spec{static_cast<KernelFamily>(state.range(0)), 2.0};
  double delta = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_value(spec, {0.5, 1.2}, delta));
    delta = delta > 10.0 ? 0.0 : delta + 0.01;
  }
}
BENCHMARK(BM_KernelValue)->DenseRange(0, 2);

static void BM_Likelihood(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto seq = uniform_sequence(3, n, static_cast<double>(n));
  const auto model = make_model(KernelFamily::Exponential, 3, static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(negative_log_likelihood(model, seq).total);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Likelihood)->Arg(1000)->Arg(10000);

static void BM_LossAndGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto seq = uniform_sequence(3, n, static_cast<double>(n));
  const auto model = make_model(KernelFamily::PowerLaw, 3, static_cast<double>(n));
  std::vector<std::size_t> batch(std::min<std::size_t>(128, n));
  std::iota(batch.begin(), batch.end(), n / 2);
  std::vector<double> grad(model.num_parameters());
  for (auto _ : state) benchmark::DoNotOptimize(model.loss_and_gradient(seq, batch, grad));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_LossAndGradient)->Arg(1000)->Arg(10000);

static void BM_Simulate(benchmark::State& state) {
  const double horizon = static_cast<double>(state.range(0));
  const auto model = make_model(KernelFamily::Exponential, 2, horizon);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(thinning_simulate(model, {horizon, ++seed}).sequence.size());
}
BENCHMARK(BM_Simulate)->Arg(500)->Arg(2000);
BENCHMARK_MAIN();
