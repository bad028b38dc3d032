#include <benchmark/benchmark.h>

#include <random>

#include "qrnn/depth.hpp"
#include "qrnn/encoding.hpp"
#include "qrnn/qrnn.hpp"
#include "qrnn/simulator.hpp"
#include "qrnn/state_vector.hpp"

using namespace qrnn;

namespace {

FeatureRow random_unit(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  FeatureRow x(dim);
  for (double& v : x) v = u(rng);
  return normalize_l2(x);
}

Circuit layered(int n, int layers) {
  Circuit c(n);
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) c.ry(q, 0.1 * (q + 1)).rz(q, 0.2 * l);
    for (int q = 0; q + 1 < n; ++q) c.cx(q, q + 1);
  }
  return c;
}

void BM_Simulate(benchmark::State& state) {
  const Circuit c = layered(static_cast<int>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(c));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}
BENCHMARK(BM_Simulate)->DenseRange(4, 16, 4);

void BM_AmplitudeQsp(benchmark::State& state) {
  const FeatureRow x = random_unit(std::size_t{1} << state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(amplitude_qsp(x));
}
BENCHMARK(BM_AmplitudeQsp)->DenseRange(2, 10, 2);

Circuit qrnn_circuit(StructureKind structure, int steps) {
  QrnnConfig cfg;
  cfg.n_h = 3;
  cfg.n_f = 2;
  cfg.structure = structure;
  std::vector<double> params(param_count(cfg), 0.3);
  Sequence seq;
  for (int t = 0; t < steps; ++t) seq.push_back(random_unit(4, static_cast<std::uint64_t>(t)));
  return build_circuit(cfg, params, encode_sequence(cfg, seq, AmplitudeFeatureMap(4)));
}

void BM_RunExactCanonical(benchmark::State& state) {
  const Circuit c = qrnn_circuit(StructureKind::Canonical, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_exact(c));
}
BENCHMARK(BM_RunExactCanonical)->Arg(2)->Arg(4)->Arg(8);

void BM_RunExactAlternating(benchmark::State& state) {
  const Circuit c = qrnn_circuit(StructureKind::AlternatingF, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_exact(c));
}
BENCHMARK(BM_RunExactAlternating)->Arg(2)->Arg(4)->Arg(8);

void BM_Sample(benchmark::State& state) {
  const Circuit c = qrnn_circuit(StructureKind::Canonical, 8);
  for (auto _ : state) benchmark::DoNotOptimize(sample(c, static_cast<std::uint64_t>(state.range(0)), 1));
}
BENCHMARK(BM_Sample)->Arg(256)->Arg(4096);

void BM_DepthPipeline(benchmark::State& state) {
  const Circuit c = qrnn_circuit(StructureKind::Canonical, 8);
  for (auto _ : state) benchmark::DoNotOptimize(circuit_depth(route(decompose(c), Coupling::LinearChain).circuit));
}
BENCHMARK(BM_DepthPipeline);

}  // namespace

BENCHMARK_MAIN();
