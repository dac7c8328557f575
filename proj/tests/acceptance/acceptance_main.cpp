// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one pass/fail line per criterion.  Exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "temperflow/bounds.hpp"
#include "temperflow/closed_forms.hpp"
#include "temperflow/experiments.hpp"
#include "temperflow/gaussian_flows.hpp"
#include "temperflow/metrics.hpp"
#include "temperflow/samplers.hpp"
#include "temperflow/util.hpp"

using namespace temperflow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

TargetPair mean_shift_pair(double m) {
  return TargetPair::gaussian(GaussianDist::scalar(0.0, 1.0),
                              GaussianDist::scalar(m, 1.0));
}

TargetPair far_narrow_pair() {
  return TargetPair::gaussian(GaussianDist::scalar(0.0, 1.0),
                              GaussianDist::scalar(20.0, 0.1));
}

TargetPair near_wide_pair() {
  return TargetPair::gaussian(GaussianDist::scalar(0.0, 1.0),
                              GaussianDist::scalar(1.0, 5.0));
}

ModelConfig far_narrow_model() {
  ModelConfig m;
  m.mu0 = GaussianDist::scalar(0.0, 1.0);
  m.pi = GaussianDist::scalar(20.0, 0.1);
  return m;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Exact KL-gap identity between standard and tempered FR.

Outcome criterion1() {
  const FixedSchedule sched = FixedSchedule::linear(10.0);
  double worst = 0.0;
  for (double m : {1.0 / 6.0, 1.0, 3.0}) {
    const auto tp = mean_shift_pair(m);
    for (int i = 1; i <= 20; ++i) {
      const double t = 0.5 * i;
      const double beta = beta_of_t(sched, t, 1e-3);
      const double gap = fr_tempering_gap_from_beta(beta, t, tp);
      if (gap > 0.0) return {false, "gap positive at t=" + fmt(t)};
      const double upper = 1.0 - std::exp(-t);
      const double kl_diff =
          kl_gaussian(geometric_interpolant(tp, upper).dist, *tp.pi_gauss) -
          kl_gaussian(geometric_interpolant(tp, beta).dist, *tp.pi_gauss);
      worst = std::max(worst, std::abs(gap - kl_diff));
    }
  }
  return {worst < 1e-8, "max |gap - KL difference| = " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// 2. Tempering never speeds up the FR flow.

Outcome criterion2() {
  const std::vector<std::pair<std::string, FixedSchedule>> schedules = {
      {"linear", FixedSchedule::linear(10.0)},
      {"exponential", FixedSchedule::exponential(0.01)},
      {"chehab", FixedSchedule::chehab()}};
  double worst = -1.0;
  for (const auto& tp : {far_narrow_pair(), near_wide_pair()}) {
    const auto fr =
        kl_along(integrate_flow(FlowKind::untempered(FlowBase::FR), tp, 10.0, 1e-3),
                 *tp.pi_gauss);
    for (const auto& [name, sched] : schedules) {
      const auto tfr = kl_along(
          integrate_flow(FlowKind::with_schedule(FlowBase::FR, sched), tp, 10.0, 1e-3),
          *tp.pi_gauss);
      for (std::size_t i = 0; i < fr.size(); ++i) {
        const double excess = fr[i].second - tfr[i].second;
        worst = std::max(worst, excess);
        if (excess > 1e-10) {
          return {false, "KL_FR exceeds KL_T-FR by " + fmt(excess) + " (" + name +
                             ", t=" + fmt(fr[i].first) + ")"};
        }
      }
    }
  }
  return {true, "max KL_FR - KL_T-FR = " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// 3. RK4 vs the 1D closed forms.

Outcome criterion3() {
  double worst = 0.0;
  for (const auto& tp : {far_narrow_pair(), near_wide_pair()}) {
    const double m0 = tp.mu0_gauss->mean[0], v0 = tp.mu0_gauss->cov(0, 0);
    const double mp = tp.pi_gauss->mean[0], vp = tp.pi_gauss->cov(0, 0);
    const FixedSchedule sched = FixedSchedule::linear(10.0);
    const closed1d::Tempered1d oracle(m0, v0, mp, vp, sched.fn(), 10.0);

    const auto w = integrate_flow(FlowKind::untempered(FlowBase::W), tp, 10.0, 1e-3);
    const auto fr = integrate_flow(FlowKind::untempered(FlowBase::FR), tp, 10.0, 1e-3);
    const auto tw =
        integrate_flow(FlowKind::with_schedule(FlowBase::W, sched), tp, 10.0, 1e-3);
    const auto tfr =
        integrate_flow(FlowKind::with_schedule(FlowBase::FR, sched), tp, 10.0, 1e-3);
    for (std::size_t i = 0; i < w.states.size(); i += 50) {
      const double t = w.states[i].t;
      worst = std::max(worst, std::abs(w.states[i].mean[0] - closed1d::w_mean(t, m0, mp, vp)));
      worst = std::max(worst, std::abs(w.states[i].cov(0, 0) - closed1d::w_var(t, v0, vp)));
      worst = std::max(worst, std::abs(fr.states[i].mean[0] - closed1d::fr_mean(t, m0, mp, v0, vp)));
      worst = std::max(worst, std::abs(fr.states[i].cov(0, 0) - closed1d::fr_var(t, v0, vp)));
      worst = std::max(worst, std::abs(tw.states[i].mean[0] - oracle.tw_mean(t)));
      worst = std::max(worst, std::abs(tw.states[i].cov(0, 0) - oracle.tw_var(t)));
      worst = std::max(worst, std::abs(tfr.states[i].mean[0] - oracle.tfr_mean(t)));
      worst = std::max(worst, std::abs(tfr.states[i].cov(0, 0) - oracle.tfr_var(t)));
    }
  }
  return {worst < 1e-6, "max |RK4 - closed form| = " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// 4. lambda = 1 reductions.

Outcome criterion4() {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> eig(0.5, 2.0);
  const auto rand_gauss = [&](int d) {
    Eigen::VectorXd mean(d);
    for (int i = 0; i < d; ++i) mean[i] = normal(gen);
    Eigen::MatrixXd q(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) q(i, j) = normal(gen);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
    Eigen::MatrixXd basis = qr.householderQ();
    Eigen::VectorXd ev(d);
    for (int i = 0; i < d; ++i) ev[i] = eig(gen);
    Eigen::MatrixXd cov = basis * ev.asDiagonal() * basis.transpose();
    return GaussianDist::make(mean, 0.5 * (cov + cov.transpose()));
  };

  const auto tp = TargetPair::gaussian(rand_gauss(2), rand_gauss(2));
  double worst = 0.0;
  for (auto base : {FlowBase::W, FlowBase::FR, FlowBase::WFR}) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto g = rand_gauss(2);
      const MomentState st{0.0, g.mean, g.cov};
      const auto a = rhs_combined(st, tp, 1.0, base, true);
      const auto b = rhs_combined(st, tp, 1.0, base, false);
      worst = std::max(worst, (a.first - b.first).cwiseAbs().maxCoeff());
      worst = std::max(worst, (a.second - b.second).cwiseAbs().maxCoeff());
    }
  }
  if (worst > 1e-14) return {false, "tempered/untempered RHS differ by " + fmt(worst)};

  // Tempered ULA with lambda = 1 vs plain ULA, bitwise under a fixed seed.
  const auto pair = far_narrow_pair();
  const std::uint64_t seed = 777;
  ParticleSystem tempered = init_particles(pair, 100, seed);
  ParticleSystem plain = tempered;
  const double gamma = 0.01;
  for (int n = 1; n <= 50; ++n) {
    tempered = tula_step(tempered, pair, 1.0, gamma, seed);
    ParticleSystem next = plain;
    next.iteration = plain.iteration + 1;
    for (int i = 0; i < plain.count(); ++i) {
      Rng rng = substream(seed, static_cast<std::uint64_t>(next.iteration),
                          static_cast<std::uint64_t>(i), RngTag::move);
      const Eigen::VectorXd x = plain.positions.row(i).transpose();
      next.positions.row(i) =
          (x + gamma * pair.pi.grad(x) + std::sqrt(2.0 * gamma) * rng.gaussian_vector(1))
              .transpose();
    }
    plain = next;
    if ((tempered.positions - plain.positions).cwiseAbs().maxCoeff() != 0.0) {
      return {false, "tempered ULA deviates from ULA at iteration " + std::to_string(n)};
    }
  }
  return {true, "RHS diff " + fmt(worst) + "; ULA bitwise over 50 steps"};
}

// ---------------------------------------------------------------------------
// 5. Schedule closed forms.

Outcome criterion5() {
  std::ostringstream detail;
  bool pass = true;

  {  // (a) Gradient-flow schedule vs the coupled ODE, m = 1/6.
    const double m = 1.0 / 6.0;
    const auto tp = mean_shift_pair(m);
    AdaptiveScheduleState st;
    st.variant = AdaptiveVariant::grad_flow;
    const auto traj = integrate_schedule(st, tp, 10.0, 1e-4);
    double err = 0.0;
    for (const auto& p : traj) {
      err = std::max(err, std::abs(p.lambda - gradflow_closed_form_meanshift(m, p.t)));
    }
    pass = pass && err < 1e-6;
    detail << "a) grad-flow vs closed form err " << fmt(err) << (err < 1e-6 ? " ok" : " FAIL");
  }

  {  // (b) Degenerate m^2 = 1/4 closed form.
    double err = 0.0;
    for (double t = 0.0; t <= 10.0; t += 0.05) {
      err = std::max(err, std::abs(gradflow_closed_form_meanshift(0.5, t) -
                                   (1.0 - (1.0 - 0.5 * t) * std::exp(-0.5 * t))));
    }
    pass = pass && err < 1e-10;
    detail << "; b) degenerate form err " << fmt(err) << (err < 1e-10 ? " ok" : " FAIL");
  }

  {  // (c) constant-KL schedule vs 1 - sqrt(1 - 2t/m^2) on [0, m^2/2).
    const double m = 1.0;
    const auto tp = mean_shift_pair(m);
    AdaptiveScheduleState st;
    st.variant = AdaptiveVariant::constant_kl;
    const auto traj = integrate_schedule(st, tp, 0.45, 1e-5);
    double err = 0.0;
    for (const auto& p : traj) {
      err = std::max(err, std::abs(p.lambda - (1.0 - std::sqrt(1.0 - 2.0 * p.t))));
    }
    pass = pass && err < 1e-6;
    detail << "; c) constant-KL err " << fmt(err) << (err < 1e-6 ? " ok" : " FAIL");
  }

  {  // (d) ESS schedule, variance pair tau^2 = 2, vs 1 - exp([1/tau^2 - 1] t).
    // The ESS ODE with Var_{rho_lambda} = k^2/2 (1 + k lambda)^{-2}, k = -1/2,
    // integrates to lambda = 2(1 - e^{-sqrt(2 beta) t}) for every beta: the
    // quoted target (amplitude 1) differs by the 1/|k| = 2 factor and no
    // beta reconciles the shapes.  Run with the exponent-matching
    // beta = k^2/2 = 1/8.
    const auto tp = TargetPair::gaussian(GaussianDist::scalar(0.0, 1.0),
                                         GaussianDist::scalar(0.0, 2.0));
    AdaptiveScheduleState st;
    st.variant = AdaptiveVariant::ess;
    st.beta_param = 0.125;
    const auto traj = integrate_schedule(st, tp, 3.0, 1e-5);
    double err = 0.0;
    for (const auto& p : traj) {
      err = std::max(err, std::abs(p.lambda - (1.0 - std::exp(-0.5 * p.t))));
    }
    pass = pass && err < 1e-6;
    detail << "; d) ESS tau^2=2 err " << fmt(err)
           << (err < 1e-6 ? " ok" : " FAIL (quoted form drops the 1/|k| amplitude)");
  }

  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. beta_t oracle.

Outcome criterion6() {
  double worst = 0.0;
  for (double t : {0.25, 1.0, 3.0, 7.5, 10.0}) {
    worst = std::max(worst, std::abs(beta_of_t(FixedSchedule::constant_one(), t, 1e-3) -
                                     (1.0 - std::exp(-t))));
    const double T = 10.0;
    worst = std::max(worst, std::abs(beta_of_t(FixedSchedule::linear(T), t, 1e-3) -
                                     (t - 1.0 + std::exp(-t)) / T));
  }
  return {worst < 1e-8, "max |beta - analytic| = " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// 7. Mirror-descent product bound on randomized sequences.

Outcome criterion7() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int violations = 0;
  double worst_excess = 0.0;
  std::string example;
  bool alpha_ordering_ok = true;
  for (int rep = 0; rep < 100; ++rep) {
    const double m = 0.2 + 3.0 * unif(gen);
    const auto tp = mean_shift_pair(m);
    const double kl_pi_mu0 = kl_gaussian(*tp.pi_gauss, *tp.mu0_gauss);
    const std::size_t len = 1 + gen() % 50;
    std::vector<double> gammas(len), lambdas(len), ones(len, 1.0);
    for (std::size_t i = 0; i < len; ++i) {
      gammas[i] = std::nextafter(unif(gen), 1.0);
      lambdas[i] = i == 0 ? std::nextafter(unif(gen), 1.0) : unif(gen);
    }
    const auto alphas = discrete_alpha(gammas, lambdas);
    const auto alpha_tilde = discrete_alpha(gammas, ones);
    for (std::size_t n = 0; n < len; ++n) {
      if (alphas[n] > alpha_tilde[n] + 1e-12) alpha_ordering_ok = false;
    }
    const double rhs = mirror_descent_kl_bound(alphas, kl_pi_mu0);
    const double exact =
        kl_gaussian(geometric_interpolant(tp, alphas.back()).dist, *tp.pi_gauss);
    if (exact > rhs + 1e-12) {
      ++violations;
      if (exact - rhs > worst_excess) {
        worst_excess = exact - rhs;
        example = "instance " + std::to_string(rep) + ": exact " + fmt(exact) +
                  " > rhs " + fmt(rhs);
      }
    }
  }
  std::ostringstream detail;
  detail << "alpha <= alpha~ " << (alpha_ordering_ok ? "ok" : "FAIL")
         << "; displayed bound violated on " << violations << "/100 instances";
  if (violations > 0) {
    detail << " (" << example
           << "; the displayed product form is not a theorem for tempered "
              "sequences: hand counterexample gamma=lambda=1/2, n=6)";
  }
  return {alpha_ordering_ok && violations == 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Shared SMC runs for criteria 8 and 9.

struct SmcCache {
  std::map<double, std::vector<SmcCompareCurves>> by_gamma;

  const std::vector<SmcCompareCurves>& get(double gamma, double horizon) {
    auto it = by_gamma.find(gamma);
    if (it != by_gamma.end()) return it->second;
    const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<SmcCompareCurves> runs(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
      runs[i] = smc_compare_single(far_narrow_model(), gamma, horizon, 400, seeds[i], 1e-3);
    });
    return by_gamma.emplace(gamma, std::move(runs)).first->second;
  }
};

SmcCache g_smc_cache;

// 8. Particle KL tracking of the exact flow at gamma = 0.001.

Outcome criterion8() {
  const auto& runs = g_smc_cache.get(0.001, 10.0);
  std::size_t ok = 0, total = 0;
  for (const auto& r : runs) {
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      const double gate = 0.15 * r.kl_exact[k] + 0.05;
      if (std::abs(r.kl_twfr[k] - r.kl_exact[k]) < gate) ++ok;
      ++total;
    }
  }
  const double frac = static_cast<double>(ok) / static_cast<double>(total);
  return {frac >= 0.90, "tracking fraction " + fmt(frac) + " over 5 seeds (" +
                            std::to_string(ok) + "/" + std::to_string(total) + ")"};
}

// 9. ESS behaviour across step sizes.

Outcome criterion9() {
  std::ostringstream detail;
  bool pass = true;
  const std::vector<std::pair<double, double>> grid = {
      {0.001, 10.0}, {0.01, 10.0}, {0.1, 100.0}};
  for (const auto& [gamma, horizon] : grid) {
    const auto& runs = g_smc_cache.get(gamma, horizon);
    double min_rel = 1.0;
    for (const auto& r : runs) {
      for (double v : r.rel_ess_tsmc) min_rel = std::min(min_rel, v);
    }
    pass = pass && min_rel > 0.70;
    detail << "tempering-SMC min rESS(gamma=" << gamma << ") = " << fmt(min_rel)
           << (min_rel > 0.70 ? " ok; " : " FAIL; ");
  }
  const auto& runs = g_smc_cache.get(0.001, 10.0);
  double mean_twfr = 0.0, mean_tsmc = 0.0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      mean_twfr += r.rel_ess_twfr[k];
      mean_tsmc += r.rel_ess_tsmc[k];
      ++n;
    }
  }
  mean_twfr /= n;
  mean_tsmc /= n;
  pass = pass && mean_twfr > mean_tsmc;
  detail << "mean rESS twfr " << fmt(mean_twfr) << (mean_twfr > mean_tsmc ? " > " : " <= ")
         << "tsmc " << fmt(mean_tsmc);
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 10. Iterations-to-threshold trend at desk scale.

Outcome criterion10() {
  ModelConfig model;
  model.mu0 = GaussianDist::scalar(0.0, 1.0);
  model.pi_is_mixture = true;

  SamplerBlock sampler;
  sampler.n_particles = 500;
  sampler.gamma = 0.01;
  sampler.iterations = 1000;
  MetricsBlock metrics;  // bandwidth 1, v-statistic, threshold 0.01

  const std::vector<double> m_grid = {1.0, 2.0, 3.0};
  const std::vector<std::string> schedules = {"none", "linear", "exponential", "chehab"};
  const std::vector<std::string> methods = {"w", "wfr"};
  const int reps = 10;

  struct Task {
    double m;
    std::size_t method, sched;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
    for (std::size_t me = 0; me < methods.size(); ++me) {
      for (std::size_t sc = 0; sc < schedules.size(); ++sc) {
        for (int r = 0; r < reps; ++r) {
          tasks.push_back({m_grid[mi], me, sc, static_cast<std::uint64_t>(1 + r)});
        }
      }
    }
  }
  std::vector<double> iters(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    const auto out = mixture_single_run(model, t.m, methods[t.method],
                                        schedules[t.sched], sampler, metrics, 0.01,
                                        t.seed, true);
    iters[i] = out.iterations_or_total();
  });

  double mean[3][2][4] = {};
  std::size_t idx = 0;
  for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
    for (std::size_t me = 0; me < methods.size(); ++me) {
      for (std::size_t sc = 0; sc < schedules.size(); ++sc) {
        for (int r = 0; r < reps; ++r, ++idx) mean[mi][me][sc] += iters[idx] / reps;
      }
    }
  }

  std::ostringstream detail;
  bool pass = true;
  for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
    const double w_none = mean[mi][0][0];
    const double wfr_none = mean[mi][1][0];
    if (wfr_none > w_none) pass = false;
    detail << "m=" << m_grid[mi] << ": wfr " << fmt(wfr_none)
           << (wfr_none <= w_none ? " <= " : " > ") << "w " << fmt(w_none) << "; ";
    for (std::size_t me = 0; me < methods.size(); ++me) {
      for (std::size_t sc = 1; sc < schedules.size(); ++sc) {
        if (mean[mi][me][sc] < mean[mi][me][0]) {
          pass = false;
          detail << methods[me] << "+" << schedules[sc] << " " << fmt(mean[mi][me][sc])
                 << " < untempered " << fmt(mean[mi][me][0]) << "; ";
        }
      }
    }
  }
  if (pass) detail << "all tempered variants at or behind their untempered counterparts";
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 11. Adaptive-schedule ordering at desk scale.

Outcome criterion11() {
  ModelConfig model;
  model.mu0 = GaussianDist::scalar(0.0, 1.0);
  model.pi_is_mixture = true;
  model.mixture_m = 2.0;

  SamplerBlock sampler;
  sampler.n_particles = 500;
  sampler.gamma = 0.01;
  sampler.iterations = 500;
  MetricsBlock metrics;

  const std::vector<std::string> strategies = {"ula", "grad_flow", "constant_kl", "ess"};
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  struct Task {
    std::size_t strat;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    for (auto seed : seeds) tasks.push_back({s, seed});
  }
  std::vector<AdaptiveTrace> traces(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) {
    traces[i] = schedules_single_run(model, strategies[tasks[i].strat], sampler,
                                     metrics, 1.0, tasks[i].seed);
  });
  const auto trace_of = [&](std::size_t strat, std::size_t seed_idx) -> const AdaptiveTrace& {
    return traces[strat * seeds.size() + seed_idx];
  };

  bool pointwise = true;
  for (std::size_t sd = 0; sd < seeds.size(); ++sd) {
    const auto& gf = trace_of(1, sd);
    const auto& ckl = trace_of(2, sd);
    const auto& ess_tr = trace_of(3, sd);
    for (std::size_t k = 0; k < gf.t.size(); ++k) {
      if (gf.t[k] <= 1.0) continue;
      if (gf.lambda[k] > ckl.lambda[k] + 1e-12 ||
          gf.lambda[k] > ess_tr.lambda[k] + 1e-12) {
        pointwise = false;
      }
    }
  }

  // Final MMD ordering ULA <= constant_kl <= ess <= grad_flow within one
  // pooled standard error.
  double mean_final[4] = {}, var_final[4] = {};
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    for (std::size_t sd = 0; sd < seeds.size(); ++sd) {
      mean_final[s] += trace_of(s, sd).mmd2.back() / seeds.size();
    }
    for (std::size_t sd = 0; sd < seeds.size(); ++sd) {
      const double c = trace_of(s, sd).mmd2.back() - mean_final[s];
      var_final[s] += c * c / (seeds.size() - 1);
    }
  }
  bool ordering = true;
  std::ostringstream detail;
  detail << "lambda point-wise " << (pointwise ? "ok" : "FAIL") << "; final mmd2 ";
  const char* names[4] = {"ula", "grad_flow", "constant_kl", "ess"};
  const std::size_t order[4] = {0, 2, 3, 1};  // ula <= constant_kl <= ess <= grad_flow
  for (std::size_t s : order) detail << names[s] << "=" << fmt(mean_final[s]) << " ";
  for (int i = 0; i + 1 < 4; ++i) {
    const std::size_t a = order[i], b = order[i + 1];
    const double se = std::sqrt(var_final[a] / seeds.size() + var_final[b] / seeds.size());
    if (mean_final[a] > mean_final[b] + se) {
      ordering = false;
      detail << "(" << names[a] << " > " << names[b] << " + se) ";
    }
  }
  return {pointwise && ordering, detail.str()};
}

// ---------------------------------------------------------------------------
// 12. Bound sanity against exact flows.

Outcome criterion12() {
  std::ostringstream detail;
  bool pass = true;
  for (const auto& tp : {far_narrow_pair(), near_wide_pair()}) {
    const RegularityConstants consts{constants_for_gaussian(*tp.pi_gauss),
                                     constants_for_gaussian(*tp.mu0_gauss)};
    const double second_moment =
        tp.mu0_gauss->cov.trace() + tp.mu0_gauss->mean.squaredNorm();
    const double a_const = tempered_w_bias_constant(consts, 1, second_moment);
    const double kl0 = kl_gaussian(*tp.mu0_gauss, *tp.pi_gauss);
    const auto one = [](double) { return 1.0; };
    const auto w =
        kl_along(integrate_flow(FlowKind::untempered(FlowBase::W), tp, 10.0, 1e-3),
                 *tp.pi_gauss);
    double min_margin = 1e300;
    for (std::size_t i = 0; i < w.size(); i += 100) {
      const double rhs = tempered_w_kl_bound(w[i].first, one, consts.pi.c, kl0, a_const);
      min_margin = std::min(min_margin, rhs - w[i].second);
    }
    pass = pass && min_margin >= -1e-12;
    detail << "tempered-W bound margin " << fmt(min_margin)
           << (min_margin >= -1e-12 ? " ok; " : " FAIL; ");
  }

  const double m = 1.0;
  const auto tp = mean_shift_pair(m);
  const auto frc = fr_assumption_constants(*tp.mu0_gauss, *tp.pi_gauss);
  const auto fr =
      kl_along(integrate_flow(FlowKind::untempered(FlowBase::FR), tp, 10.0, 1e-3),
               *tp.pi_gauss);
  double min_margin = 1e300;
  for (std::size_t i = 0; i < fr.size(); i += 100) {
    const double beta = 1.0 - std::exp(-fr[i].first);
    min_margin = std::min(min_margin, tempered_fr_kl_bound(beta, frc.M, frc.B) - fr[i].second);
  }
  pass = pass && min_margin >= -1e-12;
  detail << "tempered-FR bound margin " << fmt(min_margin) << " (M=" << fmt(frc.M)
         << ", B=" << fmt(frc.B) << ")";
  return {pass, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  struct Entry {
    int id;
    const char* label;
    std::function<Outcome()> fn;
  };
  const std::vector<Entry> criteria = {
      {1, "FR tempering KL-gap identity", criterion1},
      {2, "tempering never speeds up the FR flow", criterion2},
      {3, "RK4 vs 1D closed forms", criterion3},
      {4, "lambda = 1 reductions", criterion4},
      {5, "schedule closed forms", criterion5},
      {6, "beta_t oracle", criterion6},
      {7, "mirror-descent product bound validity", criterion7},
      {8, "particle KL tracking (statistical)", criterion8},
      {9, "ESS behaviour (statistical)", criterion9},
      {10, "iterations-to-threshold trend (statistical)", criterion10},
      {11, "adaptive-schedule ordering (statistical)", criterion11},
      {12, "bound sanity vs exact flows", criterion12},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d: %s - %s [%s] (%.1fs)\n", c.id,
                out.pass ? "PASS" : "FAIL", c.label, out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
