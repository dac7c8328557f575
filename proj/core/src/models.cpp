#include "temperflow/models.hpp"

#include <cmath>

#include "temperflow/errors.hpp"

namespace temperflow {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kPdTol = 1e-12;

// Natural parameters of log pi - log mu0 as the quadratic
// 1/2 x'Ax + b'x + c (A = Q0 - Qpi, b = theta_pi - theta_0).
struct LogRatioQuadratic {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

LogRatioQuadratic log_ratio_quadratic(const TargetPair& tp) {
  if (!tp.both_gaussian()) {
    throw ModelError("log-ratio moments need Gaussian descriptors for mu0 and pi");
  }
  const Eigen::MatrixXd q0 = tp.mu0_gauss->precision();
  const Eigen::MatrixXd qpi = tp.pi_gauss->precision();
  return {q0 - qpi, qpi * tp.pi_gauss->mean - q0 * tp.mu0_gauss->mean};
}

}  // namespace

double MixtureTarget::logpdf(double x) const {
  // log( 1/2 N(x;0,1) + 1/2 N(x;m,1) ) via log-sum-exp.
  const double a = -0.5 * x * x;
  const double b = -0.5 * (x - m) * (x - m);
  const double hi = std::max(a, b);
  return hi + std::log(0.5 * (std::exp(a - hi) + std::exp(b - hi))) - 0.5 * kLog2Pi;
}

double MixtureTarget::grad_logpdf(double x) const {
  const double a = -0.5 * x * x;
  const double b = -0.5 * (x - m) * (x - m);
  // Responsibility of the shifted component.
  const double w = 1.0 / (1.0 + std::exp(a - b));
  return -(1.0 - w) * x - w * (x - m);
}

double MixtureTarget::sample(Rng& rng) const {
  const double shift = rng.next_uniform() < 0.5 ? 0.0 : m;
  return shift + rng.next_gaussian();
}

double mixture_grad_logpdf(const MixtureTarget& t, double x) {
  return t.grad_logpdf(x);
}

double lsi_constant_mixture(double m) {
  return 1.0 + 0.5 * (std::exp(m * m) + 1.0);
}

TargetPair TargetPair::gaussian(GaussianDist mu0, GaussianDist pi) {
  if (mu0.dim() != pi.dim()) {
    throw ModelError("TargetPair: mu0 and pi dimensions disagree");
  }
  TargetPair tp;
  tp.dim = mu0.dim();

  const auto wrap = [](const GaussianDist& g) {
    // Precompute precision and log-det so particle loops avoid refactorizing.
    const Eigen::MatrixXd prec = g.precision();
    const double logdet = g.log_det_cov();
    const Eigen::VectorXd mean = g.mean;
    const int d = g.dim();
    LogDensity ld;
    ld.logpdf = [prec, logdet, mean, d](const Eigen::VectorXd& x) {
      const Eigen::VectorXd diff = x - mean;
      return -0.5 * (diff.dot(prec * diff) + logdet + d * kLog2Pi);
    };
    ld.grad = [prec, mean](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return -(prec * (x - mean));
    };
    return ld;
  };

  tp.mu0 = wrap(mu0);
  tp.pi = wrap(pi);
  tp.mu0_gauss = std::move(mu0);
  tp.pi_gauss = std::move(pi);
  return tp;
}

TargetPair TargetPair::gaussian_mixture(GaussianDist mu0, MixtureTarget pi) {
  if (mu0.dim() != 1) {
    throw ModelError("TargetPair: mixture target is 1D");
  }
  TargetPair tp = gaussian(std::move(mu0), GaussianDist::standard(1));
  tp.pi_gauss.reset();
  tp.pi.logpdf = [pi](const Eigen::VectorXd& x) { return pi.logpdf(x[0]); };
  tp.pi.grad = [pi](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, pi.grad_logpdf(x[0]));
  };
  return tp;
}

double TargetPair::log_ratio(const Eigen::VectorXd& x) const {
  return pi.logpdf(x) - mu0.logpdf(x);
}

GeometricPoint geometric_interpolant(const TargetPair& tp, double alpha) {
  if (!tp.both_gaussian()) {
    throw ModelError("geometric_interpolant: non-Gaussian endpoints");
  }
  const GaussianDist& g0 = *tp.mu0_gauss;
  const GaussianDist& gpi = *tp.pi_gauss;
  // The path is endpoint-exact by construction.
  if (alpha == 0.0) return {alpha, g0};
  if (alpha == 1.0) return {alpha, gpi};

  const Eigen::MatrixXd q =
      (1.0 - alpha) * g0.precision() + alpha * gpi.precision();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= kPdTol) {
    throw ModelError("geometric_interpolant: combined precision is not PD");
  }
  const Eigen::VectorXd theta = (1.0 - alpha) * (g0.precision() * g0.mean) +
                                alpha * (gpi.precision() * gpi.mean);
  Eigen::LLT<Eigen::MatrixXd> llt(q);
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(q.rows(), q.cols()));
  cov = 0.5 * (cov + cov.transpose());
  return {alpha, GaussianDist{llt.solve(theta), std::move(cov)}};
}

double log_ratio_variance_under(const TargetPair& tp, const GaussianDist& law) {
  const auto quad = log_ratio_quadratic(tp);
  const Eigen::MatrixXd as = quad.a * law.cov;
  const Eigen::VectorXd lin = quad.a * law.mean + quad.b;
  return 0.5 * (as * as).trace() + lin.dot(law.cov * lin);
}

double expected_log_ratio_under(const TargetPair& tp, const GaussianDist& law) {
  if (!tp.both_gaussian()) {
    throw ModelError("expected_log_ratio: non-Gaussian endpoints");
  }
  return gaussian_expected_logpdf(law, *tp.pi_gauss) -
         gaussian_expected_logpdf(law, *tp.mu0_gauss);
}

double log_ratio_variance(const TargetPair& tp, double alpha) {
  return log_ratio_variance_under(tp, geometric_interpolant(tp, alpha).dist);
}

double expected_log_ratio(const TargetPair& tp, double alpha) {
  return expected_log_ratio_under(tp, geometric_interpolant(tp, alpha).dist);
}

}  // namespace temperflow
