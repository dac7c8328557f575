#pragma once

#include <cstdint>
#include <vector>

#include "temperflow/models.hpp"
#include "temperflow/schedules.hpp"

namespace temperflow {

struct ParticleSystem {
  Eigen::MatrixXd positions;  // N x d
  Eigen::VectorXd weights;    // nonnegative, sums to 1
  int iteration = 0;
  double time = 0.0;

  int count() const { return static_cast<int>(positions.rows()); }
  int dim() const { return static_cast<int>(positions.cols()); }
};

struct ResampleMode {
  bool every_step = true;
  double ess_threshold = 0.5;  // relative ESS trigger when !every_step

  static ResampleMode always() { return {true, 0.5}; }
  static ResampleMode on_ess(double tau) { return {false, tau}; }
};

struct SamplerConfig {
  int n_particles = 100;
  double gamma = 0.01;          // constant step size
  std::vector<double> gammas;   // optional explicit sequence (overrides gamma)
  FixedSchedule schedule = FixedSchedule::constant_one();
  std::uint64_t seed = 1;
  int iterations = 100;
  ResampleMode resample = ResampleMode::always();
  int snapshot_stride = 1;

  double gamma_at(int n) const;  // gamma_n, n >= 1
};

enum class Algorithm { tula, smc_twfr, tempering_smc };

// kappa_n = int_0^gamma e^{s-gamma} lambda(t_start + s) ds, the weight
// exponent of the FR correction; closed form lambda (1 - e^{-gamma}) when the
// schedule is constant on the step, 16-point Gauss-Legendre otherwise.
double kappa_exponent(const FixedSchedule& schedule, double t_start, double gamma);
double kappa_exponent_const(double lambda, double gamma);

// Effective sample size (sum of squared weights)^{-1}, in [1, N].
double ess(const ParticleSystem& ps);

// Draw the initial cloud from mu0 (requires a Gaussian descriptor).
ParticleSystem init_particles(const TargetPair& tp, int n_particles,
                              std::uint64_t seed);

// One tempered-ULA move: x += gamma_n * (lambda ∇log pi + (1-lambda) ∇log mu0)
// + sqrt(2 gamma_n) xi.  Weights are untouched.  Noise comes from the
// (seed, iteration+1, particle) sub-stream.
ParticleSystem tula_step(const ParticleSystem& ps, const TargetPair& tp,
                         double lambda_n, double gamma_n, std::uint64_t seed);

// Log-density of the equal-weight Gaussian kernel mixture centred at the
// drifted previous particles, via log-sum-exp.
double proposal_mixture_logpdf(const Eigen::VectorXd& x, const ParticleSystem& prev,
                               const TargetPair& tp, double lambda_n, double gamma_n);

// N categorical draws by inverse CDF over the weight prefix sums; output
// weights are uniform.
ParticleSystem multinomial_resample(const ParticleSystem& ps, std::uint64_t seed);

// One step of the SMC sampler for the tempered WFR flow: resample (n > 1),
// tempered-ULA move, reweight by (pi / kernel-mixture)^{kappa_n}.
ParticleSystem smc_twfr_step(const ParticleSystem& ps, const TargetPair& tp,
                             const SamplerConfig& cfg, int n);

// One step of the tempering-SMC baseline: resample, tempered-ULA move,
// reweight by (pi/mu0)^{lambda_n - lambda_{n-1}}.
ParticleSystem tempering_smc_step(const ParticleSystem& ps, const TargetPair& tp,
                                  const SamplerConfig& cfg, int n);

struct SamplerRun {
  std::vector<ParticleSystem> snapshots;
  std::vector<double> ess_per_iteration;       // after each step, 1..T
  std::vector<double> lambda_per_iteration;    // lambda_n used by step n
  std::vector<double> time_per_iteration;      // t_n = sum_{k<=n} gamma_k
};

SamplerRun run_sampler(Algorithm algorithm, const TargetPair& tp,
                       const SamplerConfig& cfg);

// Weighted Gaussian moment fit (mean and covariance) of a particle cloud.
GaussianDist fit_gaussian_moments(const ParticleSystem& ps);

}  // namespace temperflow
