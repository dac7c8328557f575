#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "temperflow/config.hpp"
#include "temperflow/gaussian_flows.hpp"
#include "temperflow/metrics.hpp"

namespace temperflow {

// Exact draws from the configured target (Gaussian or mixture), used as the
// MMD reference sample.
Eigen::MatrixXd draw_reference(const ModelConfig& model, double mixture_m,
                               int count, std::uint64_t seed);

// "none" | "linear" | "exponential" | "chehab" with the experiment's
// parameters filled in.
FixedSchedule named_schedule(const std::string& name, double linear_horizon,
                             double exponential_rate);

// ---- mixture iterations-to-threshold runs ---------------------------------

struct MixtureOutcome {
  std::optional<std::size_t> hit_index;  // 0-based into the per-step metric
  std::size_t total_steps = 0;

  // Censored-at-T iteration count (1-based).
  double iterations_or_total() const {
    return hit_index ? static_cast<double>(*hit_index + 1)
                     : static_cast<double>(total_steps);
  }
};

MixtureOutcome mixture_single_run(const ModelConfig& model, double m,
                                  const std::string& method,
                                  const std::string& schedule_name,
                                  const SamplerBlock& sampler,
                                  const MetricsBlock& metrics,
                                  double exponential_rate, std::uint64_t seed,
                                  bool stop_at_threshold);

// ---- SMC-vs-exact-flow comparison ------------------------------------------

struct SmcCompareCurves {
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> t;
  std::vector<double> kl_exact;
  std::vector<double> kl_twfr;
  std::vector<double> kl_tsmc;
  std::vector<double> rel_ess_twfr;
  std::vector<double> rel_ess_tsmc;
};

SmcCompareCurves smc_compare_single(const ModelConfig& model, double gamma,
                                    double horizon, int n_particles,
                                    std::uint64_t seed, double ode_dt);

// ---- adaptive-schedule runs ------------------------------------------------

struct AdaptiveTrace {
  std::vector<double> t;
  std::vector<double> lambda;
  std::vector<double> mmd2;
};

AdaptiveTrace schedules_single_run(const ModelConfig& model,
                                   const std::string& strategy,
                                   const SamplerBlock& sampler,
                                   const MetricsBlock& metrics,
                                   double beta_param, std::uint64_t seed);

// ---- experiment drivers (CSV emitters) ------------------------------------

std::vector<std::filesystem::path> run_flows(const ExperimentConfig& cfg,
                                             const std::filesystem::path& outdir);
std::vector<std::filesystem::path> run_mixture(const ExperimentConfig& cfg,
                                               const std::filesystem::path& outdir);
std::vector<std::filesystem::path> run_smc_compare(const ExperimentConfig& cfg,
                                                   const std::filesystem::path& outdir);
std::vector<std::filesystem::path> run_schedules(const ExperimentConfig& cfg,
                                                 const std::filesystem::path& outdir);
std::vector<std::filesystem::path> run_bounds(const ExperimentConfig& cfg,
                                              const std::filesystem::path& outdir);
std::vector<std::filesystem::path> run_sample(const ExperimentConfig& cfg,
                                              const std::filesystem::path& outdir);

// Dispatches on cfg.experiment and writes the run manifest.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg,
                                                  const std::filesystem::path& outdir);

}  // namespace temperflow
