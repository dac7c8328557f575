#pragma once

#include <functional>
#include <optional>

#include "temperflow/gaussian.hpp"

namespace temperflow {

// Differentiable (possibly unnormalized) log-density with gradient.
struct LogDensity {
  std::function<double(const Eigen::VectorXd&)> logpdf;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
};

// Two-component Gaussian mixture pi(x) = 1/2 N(x;0,1) + 1/2 N(x;m,1), 1D.
struct MixtureTarget {
  double m = 0.0;

  double logpdf(double x) const;
  double grad_logpdf(double x) const;
  double sample(Rng& rng) const;
};

double mixture_grad_logpdf(const MixtureTarget& t, double x);

// Log-Sobolev constant of the mixture target: 1 + (e^{m^2} + 1)/2.
double lsi_constant_mixture(double m);

// Initial distribution mu0 and target pi as log-densities, with optional
// closed-form Gaussian descriptors.  Everything that needs normalization
// (KL, interpolants, schedule variances) requires both descriptors.
struct TargetPair {
  LogDensity pi;
  LogDensity mu0;
  std::optional<GaussianDist> pi_gauss;
  std::optional<GaussianDist> mu0_gauss;
  int dim = 1;

  bool both_gaussian() const { return pi_gauss && mu0_gauss; }

  static TargetPair gaussian(GaussianDist mu0, GaussianDist pi);
  static TargetPair gaussian_mixture(GaussianDist mu0, MixtureTarget pi);

  // log pi(x) - log mu0(x); usable with unnormalized densities, where it is
  // defined up to an additive constant.
  double log_ratio(const Eigen::VectorXd& x) const;
};

// Point on the geometric path rho_alpha ∝ mu0^{1-alpha} pi^{alpha}.
struct GeometricPoint {
  double alpha = 0.0;
  GaussianDist dist;
};

// Closed-form rho_alpha for Gaussian endpoints: precision interpolation
// (1-alpha) Sigma0^{-1} + alpha Sigmapi^{-1} with matching natural mean.
// Exact at the endpoints (alpha = 0 returns mu0, alpha = 1 returns pi).
GeometricPoint geometric_interpolant(const TargetPair& tp, double alpha);

// Var under rho_alpha of log(mu0/pi), closed form for Gaussian endpoints.
double log_ratio_variance(const TargetPair& tp, double alpha);

// E under rho_alpha of log(pi/mu0) including normalizing constants.
double expected_log_ratio(const TargetPair& tp, double alpha);

// Same moments under an arbitrary Gaussian law (closed form).
double log_ratio_variance_under(const TargetPair& tp, const GaussianDist& law);
double expected_log_ratio_under(const TargetPair& tp, const GaussianDist& law);

}  // namespace temperflow
