#include "temperflow/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "temperflow/errors.hpp"
#include "temperflow/rng.hpp"
#include "temperflow/util.hpp"

namespace temperflow {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double schedule_time(const SamplerConfig& cfg, int n) {
  // t_n = sum_{k<=n} gamma_k; multiplicative for the constant-step case.
  if (cfg.gammas.empty()) return cfg.gamma * static_cast<double>(n);
  double t = 0.0;
  for (int k = 1; k <= n; ++k) t += cfg.gammas[static_cast<std::size_t>(k - 1)];
  return t;
}

// Drifted positions B_i = x_i + gamma (lambda ∇log pi + (1-lambda) ∇log mu0).
Eigen::MatrixXd drift_positions(const ParticleSystem& ps, const TargetPair& tp,
                                double lambda, double gamma) {
  const int n = ps.count();
  const int d = ps.dim();
  Eigen::MatrixXd out(n, d);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = ps.positions.row(i).transpose();
    Eigen::VectorXd g;
    if (lambda == 1.0) {
      g = tp.pi.grad(x);
    } else if (lambda == 0.0) {
      g = tp.mu0.grad(x);
    } else {
      g = lambda * tp.pi.grad(x) + (1.0 - lambda) * tp.mu0.grad(x);
    }
    if (!g.allFinite()) {
      throw NumericsError("tula_step: non-finite drift at particle " +
                          std::to_string(i));
    }
    out.row(i) = (x + gamma * g).transpose();
  }
  return out;
}

// Row-wise log of the equal-weight kernel mixture N(x; B_i, 2 gamma I).
void mixture_logpdf_rows(const Eigen::MatrixXd& targets,
                         const Eigen::MatrixXd& centers, double gamma,
                         Eigen::VectorXd& out) {
  const int n = static_cast<int>(targets.rows());
  const int m = static_cast<int>(centers.rows());
  const int d = static_cast<int>(targets.cols());
  const double inv4g = 1.0 / (4.0 * gamma);
  const double log_norm =
      -std::log(static_cast<double>(m)) - 0.5 * d * (kLog2Pi + std::log(2.0 * gamma));
  out.resize(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    double hi = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd expo(m);
    for (int i = 0; i < m; ++i) {
      double sq = 0.0;
      for (int k = 0; k < d; ++k) {
        const double diff = targets(j, k) - centers(i, k);
        sq += diff * diff;
      }
      expo[i] = -sq * inv4g;
      if (expo[i] > hi) hi = expo[i];
    }
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += std::exp(expo[i] - hi);
    out[j] = hi + std::log(sum) + log_norm;
  });
}

// Normalizes log-weights in place into ps.weights; throws on degeneracy.
void apply_log_weights(ParticleSystem& ps, const Eigen::VectorXd& logw, int n) {
  const double hi = logw.maxCoeff();
  if (!std::isfinite(hi)) {
    throw NumericsError("degenerate weights at iteration " + std::to_string(n) +
                        " (max log-weight " + std::to_string(hi) + ")");
  }
  Eigen::VectorXd w = (logw.array() - hi).exp();
  const double total = w.sum();
  if (!(total > 0.0) || !w.allFinite()) {
    throw NumericsError("degenerate weights at iteration " + std::to_string(n));
  }
  ps.weights = w / total;
}

bool should_resample(const ParticleSystem& ps, const ResampleMode& mode) {
  if (mode.every_step) return true;
  return ess(ps) < mode.ess_threshold * static_cast<double>(ps.count());
}

}  // namespace

double SamplerConfig::gamma_at(int n) const {
  if (gammas.empty()) return gamma;
  if (n < 1 || n > static_cast<int>(gammas.size())) {
    throw ModelError("SamplerConfig: step index outside the gamma sequence");
  }
  return gammas[static_cast<std::size_t>(n - 1)];
}

double kappa_exponent_const(double lambda, double gamma) {
  return lambda * (1.0 - std::exp(-gamma));
}

double kappa_exponent(const FixedSchedule& schedule, double t_start, double gamma) {
  if (schedule.is_constant()) {
    return kappa_exponent_const(schedule.eval(t_start), gamma);
  }
  return gauss_legendre_16(
      [&](double s) { return std::exp(s - gamma) * schedule.eval(t_start + s); },
      0.0, gamma);
}

double ess(const ParticleSystem& ps) {
  return 1.0 / ps.weights.squaredNorm();
}

ParticleSystem init_particles(const TargetPair& tp, int n_particles,
                              std::uint64_t seed) {
  if (n_particles < 2) throw ModelError("init_particles: need N >= 2");
  if (!tp.mu0_gauss) throw ModelError("init_particles: mu0 needs a Gaussian descriptor");
  const int d = tp.mu0_gauss->dim();
  Eigen::LLT<Eigen::MatrixXd> llt(tp.mu0_gauss->cov);
  ParticleSystem ps;
  ps.positions.resize(n_particles, d);
  for (int i = 0; i < n_particles; ++i) {
    Rng rng = substream(seed, 0, static_cast<std::uint64_t>(i), RngTag::init);
    ps.positions.row(i) =
        (tp.mu0_gauss->mean + llt.matrixL() * rng.gaussian_vector(d)).transpose();
  }
  ps.weights = Eigen::VectorXd::Constant(n_particles, 1.0 / n_particles);
  return ps;
}

ParticleSystem tula_step(const ParticleSystem& ps, const TargetPair& tp,
                         double lambda_n, double gamma_n, std::uint64_t seed) {
  if (!(gamma_n >= 0.0)) throw ModelError("tula_step: gamma must be nonnegative");
  ParticleSystem out = ps;
  out.iteration = ps.iteration + 1;
  out.time = ps.time + gamma_n;
  if (gamma_n == 0.0) return out;

  const Eigen::MatrixXd drifted = drift_positions(ps, tp, lambda_n, gamma_n);
  const double noise = std::sqrt(2.0 * gamma_n);
  const int d = ps.dim();
  for (int i = 0; i < ps.count(); ++i) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(out.iteration),
                        static_cast<std::uint64_t>(i), RngTag::move);
    out.positions.row(i) = drifted.row(i) + noise * rng.gaussian_vector(d).transpose();
  }
  return out;
}

double proposal_mixture_logpdf(const Eigen::VectorXd& x, const ParticleSystem& prev,
                               const TargetPair& tp, double lambda_n, double gamma_n) {
  if (prev.count() < 1) throw ModelError("proposal_mixture_logpdf: empty system");
  const Eigen::MatrixXd centers = drift_positions(prev, tp, lambda_n, gamma_n);
  Eigen::MatrixXd target(1, x.size());
  target.row(0) = x.transpose();
  Eigen::VectorXd out;
  mixture_logpdf_rows(target, centers, gamma_n, out);
  return out[0];
}

ParticleSystem multinomial_resample(const ParticleSystem& ps, std::uint64_t seed) {
  const int n = ps.count();
  std::vector<double> cdf(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += ps.weights[i];
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  cdf.back() = 1.0;

  ParticleSystem out = ps;
  for (int i = 0; i < n; ++i) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(ps.iteration),
                        static_cast<std::uint64_t>(i), RngTag::resample);
    const double u = rng.next_uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto idx = static_cast<int>(it - cdf.begin());
    out.positions.row(i) = ps.positions.row(idx);
  }
  out.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  return out;
}

ParticleSystem smc_twfr_step(const ParticleSystem& ps, const TargetPair& tp,
                             const SamplerConfig& cfg, int n) {
  if (n < 1) throw ModelError("smc_twfr_step: n >= 1");
  const double gamma_n = cfg.gamma_at(n);
  const double t_prev = schedule_time(cfg, n - 1);
  const double lambda_n = cfg.schedule.eval(t_prev + gamma_n);

  ParticleSystem work = ps;
  if (n > 1 && should_resample(work, cfg.resample)) {
    work = multinomial_resample(work, cfg.seed);
  }

  // W part: tempered-ULA move from the (possibly resampled) cloud.
  const Eigen::MatrixXd centers = drift_positions(work, tp, lambda_n, gamma_n);
  ParticleSystem out = work;
  out.iteration = ps.iteration + 1;
  out.time = t_prev + gamma_n;
  const double noise = std::sqrt(2.0 * gamma_n);
  const int d = work.dim();
  for (int i = 0; i < work.count(); ++i) {
    Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(out.iteration),
                        static_cast<std::uint64_t>(i), RngTag::move);
    out.positions.row(i) = centers.row(i) + noise * rng.gaussian_vector(d).transpose();
  }

  // FR part: weights ∝ (pi / kernel-mixture)^{kappa_n}.
  const double kappa = kappa_exponent(cfg.schedule, t_prev, gamma_n);
  Eigen::VectorXd mix_log;
  mixture_logpdf_rows(out.positions, centers, gamma_n, mix_log);
  Eigen::VectorXd logw(out.count());
  for (int i = 0; i < out.count(); ++i) {
    const Eigen::VectorXd x = out.positions.row(i).transpose();
    logw[i] = std::log(work.weights[i]) + kappa * (tp.pi.logpdf(x) - mix_log[i]);
  }
  apply_log_weights(out, logw, n);
  return out;
}

ParticleSystem tempering_smc_step(const ParticleSystem& ps, const TargetPair& tp,
                                  const SamplerConfig& cfg, int n) {
  if (n < 1) throw ModelError("tempering_smc_step: n >= 1");
  const double gamma_n = cfg.gamma_at(n);
  const double t_prev = schedule_time(cfg, n - 1);
  const double lambda_prev = cfg.schedule.eval(t_prev);
  const double lambda_n = cfg.schedule.eval(t_prev + gamma_n);
  if (lambda_n < lambda_prev) {
    throw ModelError("tempering_smc_step: schedule must be non-decreasing");
  }

  ParticleSystem work = ps;
  if (n > 1 && should_resample(work, cfg.resample)) {
    work = multinomial_resample(work, cfg.seed);
  }
  ParticleSystem out = tula_step(work, tp, lambda_n, gamma_n, cfg.seed);
  out.iteration = ps.iteration + 1;

  const double delta = lambda_n - lambda_prev;
  Eigen::VectorXd logw(out.count());
  for (int i = 0; i < out.count(); ++i) {
    const Eigen::VectorXd x = out.positions.row(i).transpose();
    logw[i] = std::log(work.weights[i]) + delta * tp.log_ratio(x);
  }
  apply_log_weights(out, logw, n);
  return out;
}

SamplerRun run_sampler(Algorithm algorithm, const TargetPair& tp,
                       const SamplerConfig& cfg) {
  if (cfg.iterations < 0) throw ModelError("run_sampler: negative iteration count");
  SamplerRun run;
  ParticleSystem ps = init_particles(tp, cfg.n_particles, cfg.seed);
  run.snapshots.push_back(ps);
  run.ess_per_iteration.reserve(cfg.iterations);

  for (int n = 1; n <= cfg.iterations; ++n) {
    const double gamma_n = cfg.gamma_at(n);
    const double t_n = schedule_time(cfg, n);
    const double lambda_n = cfg.schedule.eval(t_n);
    switch (algorithm) {
      case Algorithm::tula:
        ps = tula_step(ps, tp, lambda_n, gamma_n, cfg.seed);
        ps.time = t_n;
        break;
      case Algorithm::smc_twfr:
        ps = smc_twfr_step(ps, tp, cfg, n);
        break;
      case Algorithm::tempering_smc:
        ps = tempering_smc_step(ps, tp, cfg, n);
        ps.time = t_n;
        break;
    }
    run.ess_per_iteration.push_back(ess(ps));
    run.lambda_per_iteration.push_back(lambda_n);
    run.time_per_iteration.push_back(t_n);
    if (cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0) {
      run.snapshots.push_back(ps);
    }
  }
  return run;
}

GaussianDist fit_gaussian_moments(const ParticleSystem& ps) {
  const int n = ps.count();
  const int d = ps.dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) {
    mean += ps.weights[i] * ps.positions.row(i).transpose();
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd c = ps.positions.row(i).transpose() - mean;
    cov += ps.weights[i] * (c * c.transpose());
  }
  return GaussianDist{std::move(mean), std::move(cov)};
}

}  // namespace temperflow
