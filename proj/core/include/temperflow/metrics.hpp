#pragma once

#include <optional>
#include <vector>

#include "temperflow/models.hpp"
#include "temperflow/samplers.hpp"

namespace temperflow {

enum class MmdEstimator { v_statistic, u_statistic };

struct MmdConfig {
  double bandwidth = 1.0;
  MmdEstimator estimator = MmdEstimator::v_statistic;
  int ref_size = 0;  // 0: match the particle count
};

// Squared MMD with kernel exp(-|x-y|^2 / (2 bw^2)) between a weighted sample
// and an unweighted reference.  The V-statistic keeps diagonal terms and is
// nonnegative; the U-statistic drops them.
double mmd2(const ParticleSystem& ps, const Eigen::MatrixXd& reference,
            const MmdConfig& cfg);

// Kernel self-sum of the reference sample; callers evaluating a whole
// trajectory against one fixed reference can precompute it.
double mmd_reference_term(const Eigen::MatrixXd& reference, const MmdConfig& cfg);
double mmd2_with_reference_term(const ParticleSystem& ps,
                                const Eigen::MatrixXd& reference,
                                const MmdConfig& cfg, double reference_term);

// Weighted variance over particles of log mu0 - log pi (unnormalized
// densities are fine, additive constants cancel).
double empirical_log_ratio_variance(const ParticleSystem& ps, const TargetPair& tp);

// First index with metric < threshold, or nullopt.
std::optional<std::size_t> iterations_to_threshold(const std::vector<double>& metric,
                                                   double threshold);

}  // namespace temperflow
