#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "temperflow/metrics.hpp"
#include "temperflow/models.hpp"
#include "temperflow/samplers.hpp"
#include "temperflow/schedules.hpp"

namespace temperflow {

enum class ExperimentKind { flows, mixture, smc_compare, schedules, bounds, sample };

struct ModelConfig {
  GaussianDist mu0 = GaussianDist::standard(1);
  bool pi_is_mixture = false;
  GaussianDist pi = GaussianDist::standard(1);
  double mixture_m = 0.0;

  TargetPair build() const;
  TargetPair build_with_mixture_m(double m) const;
};

// schedule.kind covers both the fixed schedules and the adaptive variants;
// fixed() is only valid for the fixed kinds.
struct ScheduleConfig {
  std::string kind = "constant";
  double horizon = 10.0;      // linear
  double rate = 1.0;          // exponential
  double beta_param = 1.0;    // adaptive variants
  double dt = 1e-3;           // adaptive integration step

  bool is_fixed() const;
  FixedSchedule fixed() const;
};

struct SamplerBlock {
  std::string algorithm = "smc_twfr";
  int n_particles = 400;
  double gamma = 0.001;
  std::vector<double> gammas;
  int iterations = 100;
  std::uint64_t seed = 1;
  bool resample_every_step = true;
  double ess_threshold = 0.5;
  int snapshot_stride = 1;

  SamplerConfig build(const FixedSchedule& schedule) const;
  Algorithm parsed_algorithm() const;
};

struct MetricsBlock {
  double bandwidth = 1.0;
  std::string estimator = "v_statistic";
  int ref_size = 0;
  double threshold = 0.01;
};

struct MixtureBlock {
  std::vector<double> m_grid = {1.0, 2.0, 3.0};
  int replications = 10;
  std::vector<std::string> schedules = {"none", "linear", "exponential", "chehab"};
  double exponential_rate = 0.01;
  std::vector<double> m_grid_paper = {1.0, 2.0, 3.0, 4.0, 5.0};
  int replications_paper = 50;
};

struct SmcBlock {
  std::vector<double> gammas = {0.001, 0.01, 0.1};
  std::vector<double> horizons = {10.0, 10.0, 100.0};
  int n_particles = 400;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double ode_dt = 1e-3;
};

struct AdaptiveBlock {
  std::vector<std::string> strategies = {"ula", "grad_flow", "constant_kl", "ess"};
  double beta_param = 1.0;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
};

struct FlowBlock {
  double t_end = 10.0;
  double dt = 1e-3;
  std::vector<std::string> kinds = {"w", "fr", "wfr", "tw", "tfr", "twfr"};
};

struct BoundsBlock {
  double t_max = 10.0;
  double t_step = 0.1;
  double ode_dt = 1e-3;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::flows;
  ModelConfig model;
  ScheduleConfig schedule;
  SamplerBlock sampler;
  MetricsBlock metrics;
  MixtureBlock mixture;
  SmcBlock smc;
  AdaptiveBlock adaptive;
  FlowBlock flow;
  BoundsBlock bounds;
  std::string out_dir = "out";
  bool paper_scale = false;

  std::uint64_t config_hash = 0;  // FNV-1a of the raw config bytes
};

// Parses and validates a config file; unknown keys are rejected with their
// full key path.  Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

MmdConfig build_mmd_config(const MetricsBlock& m, int fallback_ref);

}  // namespace temperflow
