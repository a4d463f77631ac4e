#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "bldiff/bldiff.hpp"

using namespace bldiff;

namespace {

const DegreeConfig kDegrees{3, -1.0, 0.2};
const WeightVectors kWeights = compute_weights(kDegrees);
const InternalGains kGains = InternalGains::uniform(3, 1.0, 1.0);
const GainLadder kLadder = GainLadder::from_gains({3.0, 1.5 * std::sqrt(3.0), 1.1});

DifferentiatorConfig reference_design() { return DifferentiatorConfig::make(kDegrees, kGains, kLadder); }

}  // namespace

static void VarphiEval(benchmark::State& state) {
  double s = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(varphi_eval(1, s, kWeights, kGains));
    s = -s;
  }
}
BENCHMARK(VarphiEval);

static void PhiAll(benchmark::State& state) {
  std::vector<double> out(3);
  for (auto _ : state) {
    phi_all(0.37, kWeights, kGains, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(PhiAll);

static void VarphiInverse(benchmark::State& state) {
  const double y = std::pow(10.0, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(varphi_inverse(1, y, kWeights, kGains));
}
BENCHMARK(VarphiInverse)->DenseRange(-6, 6, 6);

static void DifferentiatorRhs(benchmark::State& state) {
  const auto cfg = reference_design();
  std::vector<double> x{0.4, -1.2, 0.3}, out(3);
  for (auto _ : state) {
    differentiator_rhs(x, 0.5, cfg, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(DifferentiatorRhs);

static void LyapunovV(benchmark::State& state) {
  const LyapunovFunction lyap(kWeights, kGains, LyapunovParams::defaults(kWeights));
  const std::vector<double> z{0.4, -1.2, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(lyap.V(z));
}
BENCHMARK(LyapunovV);

static void WStar(benchmark::State& state) {
  const LyapunovFunction lyap(kWeights, kGains, LyapunovParams::defaults(kWeights));
  const std::vector<double> z{0.4, -1.2, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(lyap.W_star(z, kLadder, 0.0));
}
BENCHMARK(WStar);

static void IntegrateReferenceExample(benchmark::State& state) {
  const auto cfg = reference_design();
  const auto signal = SignalSpec::sinusoid_mix(3, {0.5, 1.0}, {0.5, 0.0}, {0.0, 0.5});
  IntegrateOptions opt;
  opt.dt = 1e-4;
  opt.t_final = static_cast<double>(state.range(0));
  opt.record_every = 100;
  const std::vector<double> e0{1.0, -5.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_from_error(cfg, e0, signal, opt).size());
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(opt.t_final / opt.dt));
}
BENCHMARK(IntegrateReferenceExample)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
