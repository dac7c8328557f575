#pragma once

#include <Eigen/Dense>

#include "temperflow/rng.hpp"

namespace temperflow {

// Multivariate Gaussian given by mean and covariance.  `make` validates
// symmetry and positive definiteness (eigenvalue threshold 1e-12); the
// density/gradient/KL helpers below assume a validated instance.
struct GaussianDist {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }

  static GaussianDist make(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  static GaussianDist standard(int d);
  // 1D convenience.
  static GaussianDist scalar(double mean, double variance);

  Eigen::MatrixXd precision() const;
  double log_det_cov() const;
};

double gaussian_logpdf(const GaussianDist& g, const Eigen::VectorXd& x);
Eigen::VectorXd gaussian_grad_logpdf(const GaussianDist& g, const Eigen::VectorXd& x);

// Closed-form D_KL(p || q); both PD, same dimension.
double kl_gaussian(const GaussianDist& p, const GaussianDist& q);

// E_{p}[log q], the negative cross-entropy; used by the schedule ODEs.
double gaussian_expected_logpdf(const GaussianDist& p, const GaussianDist& q);

Eigen::VectorXd gaussian_sample(const GaussianDist& g, Rng& rng);

}  // namespace temperflow
