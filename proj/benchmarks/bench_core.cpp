#include <benchmark/benchmark.h>

#include "temperflow/experiments.hpp"
#include "temperflow/gaussian_flows.hpp"
#include "temperflow/metrics.hpp"
#include "temperflow/samplers.hpp"

using namespace temperflow;

namespace {

TargetPair far_narrow_pair() {
  return TargetPair::gaussian(GaussianDist::scalar(0.0, 1.0),
                              GaussianDist::scalar(20.0, 0.1));
}

void bm_integrate_flow_twfr(benchmark::State& state) {
  const auto tp = far_narrow_pair();
  const auto kind =
      FlowKind::with_schedule(FlowBase::WFR, FixedSchedule::linear(10.0));
  for (auto _ : state) {
    auto traj = integrate_flow(kind, tp, 1.0, 1e-3);
    benchmark::DoNotOptimize(traj.states.back().mean.data());
  }
}
BENCHMARK(bm_integrate_flow_twfr);

void bm_tula_step(benchmark::State& state) {
  const auto tp = far_narrow_pair();
  const auto n = static_cast<int>(state.range(0));
  ParticleSystem ps = init_particles(tp, n, 1);
  for (auto _ : state) {
    ps = tula_step(ps, tp, 0.5, 0.001, 1);
    benchmark::DoNotOptimize(ps.positions.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_tula_step)->Arg(400)->Arg(1000);

void bm_smc_twfr_step(benchmark::State& state) {
  const auto tp = far_narrow_pair();
  const auto n = static_cast<int>(state.range(0));
  SamplerConfig cfg;
  cfg.n_particles = n;
  cfg.gamma = 0.001;
  cfg.schedule = FixedSchedule::linear(10.0);
  cfg.iterations = 1;
  ParticleSystem ps = init_particles(tp, n, 1);
  int step = 1;
  for (auto _ : state) {
    ps = smc_twfr_step(ps, tp, cfg, step == 1 ? 1 : 2);
    step = 2;
    benchmark::DoNotOptimize(ps.weights.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(bm_smc_twfr_step)->Arg(400)->Arg(1000);

void bm_mmd2(benchmark::State& state) {
  const auto tp = far_narrow_pair();
  const auto n = static_cast<int>(state.range(0));
  ParticleSystem ps = init_particles(tp, n, 1);
  ModelConfig model;
  model.mu0 = *tp.mu0_gauss;
  model.pi = *tp.pi_gauss;
  const Eigen::MatrixXd ref = draw_reference(model, 0.0, n, 2);
  const MmdConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mmd2(ps, ref, cfg));
  }
  state.SetItemsProcessed(state.iterations() * 3 * n * n);
}
BENCHMARK(bm_mmd2)->Arg(500)->Arg(2000);

}  // namespace
