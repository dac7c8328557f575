#include "temperflow/gaussian.hpp"

#include <cmath>

#include "temperflow/errors.hpp"

namespace temperflow {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kPdTol = 1e-12;

Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& cov, const char* who) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw ModelError(std::string(who) + ": covariance is not positive definite");
  }
  return llt;
}

}  // namespace

GaussianDist GaussianDist::make(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size()) {
    throw ModelError("GaussianDist: mean/covariance dimensions disagree");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kPdTol * scale) {
    throw ModelError("GaussianDist: covariance is not symmetric");
  }
  Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= kPdTol) {
    throw ModelError("GaussianDist: covariance is not positive definite");
  }
  return GaussianDist{std::move(mean), std::move(sym)};
}

GaussianDist GaussianDist::standard(int d) {
  return GaussianDist{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d)};
}

GaussianDist GaussianDist::scalar(double mean, double variance) {
  return make(Eigen::VectorXd::Constant(1, mean),
              Eigen::MatrixXd::Constant(1, 1, variance));
}

Eigen::MatrixXd GaussianDist::precision() const {
  auto llt = checked_llt(cov, "GaussianDist::precision");
  Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(dim(), dim()));
  return 0.5 * (prec + prec.transpose());
}

double GaussianDist::log_det_cov() const {
  auto llt = checked_llt(cov, "GaussianDist::log_det_cov");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double gaussian_logpdf(const GaussianDist& g, const Eigen::VectorXd& x) {
  if (x.size() != g.mean.size()) {
    throw ModelError("gaussian_logpdf: dimension mismatch");
  }
  auto llt = checked_llt(g.cov, "gaussian_logpdf");
  const Eigen::VectorXd diff = x - g.mean;
  const double quad = diff.dot(llt.solve(diff));
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (quad + logdet + g.dim() * kLog2Pi);
}

Eigen::VectorXd gaussian_grad_logpdf(const GaussianDist& g, const Eigen::VectorXd& x) {
  if (x.size() != g.mean.size()) {
    throw ModelError("gaussian_grad_logpdf: dimension mismatch");
  }
  auto llt = checked_llt(g.cov, "gaussian_grad_logpdf");
  return -llt.solve(x - g.mean);
}

double kl_gaussian(const GaussianDist& p, const GaussianDist& q) {
  if (p.dim() != q.dim()) {
    throw ModelError("kl_gaussian: dimension mismatch");
  }
  auto llt_q = checked_llt(q.cov, "kl_gaussian");
  checked_llt(p.cov, "kl_gaussian");
  const int d = p.dim();
  const double trace = llt_q.solve(p.cov).trace();
  const Eigen::VectorXd diff = q.mean - p.mean;
  const double quad = diff.dot(llt_q.solve(diff));
  const double logdet_q =
      2.0 * llt_q.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double kl = 0.5 * (trace + quad - d + logdet_q - p.log_det_cov());
  // Exact zero for identical inputs; tiny negatives are roundoff.
  return kl < 0.0 && kl > -1e-12 ? 0.0 : kl;
}

double gaussian_expected_logpdf(const GaussianDist& p, const GaussianDist& q) {
  if (p.dim() != q.dim()) {
    throw ModelError("gaussian_expected_logpdf: dimension mismatch");
  }
  auto llt_q = checked_llt(q.cov, "gaussian_expected_logpdf");
  const double trace = llt_q.solve(p.cov).trace();
  const Eigen::VectorXd diff = p.mean - q.mean;
  const double quad = diff.dot(llt_q.solve(diff));
  const double logdet_q =
      2.0 * llt_q.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (trace + quad + logdet_q + p.dim() * kLog2Pi);
}

Eigen::VectorXd gaussian_sample(const GaussianDist& g, Rng& rng) {
  auto llt = checked_llt(g.cov, "gaussian_sample");
  return g.mean + llt.matrixL() * rng.gaussian_vector(g.dim());
}

}  // namespace temperflow
