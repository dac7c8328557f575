#include "temperflow/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "temperflow/errors.hpp"

namespace temperflow {

DistConstants constants_for_gaussian(const GaussianDist& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.precision());
  if (eig.info() != Eigen::Success) {
    throw ModelError("constants_for_gaussian: eigendecomposition failed");
  }
  DistConstants out;
  out.c = eig.eigenvalues().minCoeff();
  out.L = eig.eigenvalues().maxCoeff();
  if (!(out.c > 0.0)) {
    throw ModelError("constants_for_gaussian: precision not PD");
  }
  // grad V at the origin is Sigma^{-1} m; epsilon = 1/c.
  const double grad0 = (g.precision() * g.mean).norm();
  out.a = 0.5 * out.c;
  out.b = grad0 * grad0 / (2.0 * out.c);
  return out;
}

FrConstants fr_assumption_constants(const GaussianDist& mu0, const GaussianDist& pi) {
  if (mu0.dim() != pi.dim()) {
    throw ModelError("fr_assumption_constants: dimension mismatch");
  }
  // log(mu0/pi) = 1/2 x'(Qpi - Q0)x + b'x + c; bound the three pieces by
  // multiples of (1 + |x|^2).
  const Eigen::MatrixXd q0 = mu0.precision();
  const Eigen::MatrixXd qpi = pi.precision();
  const Eigen::MatrixXd quad = qpi - q0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(quad);
  const double quad_norm =
      eig.eigenvalues().cwiseAbs().maxCoeff();
  const Eigen::VectorXd b = q0 * mu0.mean - qpi * pi.mean;
  const double c = 0.5 * (pi.mean.dot(qpi * pi.mean) - mu0.mean.dot(q0 * mu0.mean)) +
                   0.5 * (pi.log_det_cov() - mu0.log_det_cov());
  const double bn = b.norm();
  FrConstants out;
  out.M = std::max(0.5 * quad_norm + 0.5 * bn, 0.5 * bn + std::abs(c));
  out.B = std::max(mu0.cov.trace() + mu0.mean.squaredNorm(),
                   pi.cov.trace() + pi.mean.squaredNorm());
  return out;
}

double tempered_w_bias_constant(const RegularityConstants& k, int dim, double second_moment_mu0) {
  const double d = static_cast<double>(dim);
  const double lmax2 = std::max(k.pi.L * k.pi.L, k.mu0.L * k.mu0.L);
  const double moment_cap =
      std::max(second_moment_mu0, (d + k.mu0.b + k.pi.b) / std::min(k.mu0.a, k.pi.a));
  const double offset = std::max(k.pi.b / k.pi.a, k.mu0.b / k.mu0.a);
  return d * (k.mu0.L - k.pi.c) + 4.0 * lmax2 * (moment_cap + offset);
}

double tempered_ula_bias_constant(const RegularityConstants& k, int dim,
                        double second_moment_mu0) {
  const double d = static_cast<double>(dim);
  const double moment_cap = std::max(
      second_moment_mu0,
      2.0 * (1.5 * (k.mu0.b + k.pi.b) + d) / std::min({k.mu0.a, k.pi.a, 1.0}));
  return 2.0 * k.mu0.L * k.mu0.b / k.mu0.a + 2.0 * k.pi.L * k.pi.b / k.pi.a +
         2.0 * (k.mu0.L + k.pi.L) * moment_cap;
}

double tempered_w_kl_bound(double t, const Fn1d& lambda, double c_pi, double kl0, double A) {
  if (t < 0.0) throw ModelError("tempered_w_kl_bound: negative time");
  const double decay = std::exp(-2.0 * t * c_pi);
  const double bias = adaptive_simpson(
      [&](double s) { return std::exp(-2.0 * (t - s) * c_pi) * (1.0 - lambda(s)); },
      0.0, t, 1e-9);
  return decay * kl0 + A * bias;
}

double tempered_fr_kl_bound(double beta_t, double M, double B) {
  if (beta_t < 0.0 || beta_t > 1.0) throw ModelError("tempered_fr_kl_bound: beta outside [0,1]");
  const double gap = 1.0 - beta_t;
  return M * gap * (2.0 + B + B * std::exp(M * (1.0 + B) * gap));
}

double fr_tempering_gap_from_beta(double beta_t, double t, const TargetPair& tp) {
  const double upper = 1.0 - std::exp(-t);
  if (beta_t > upper + 1e-12) {
    throw ModelError("fr_tempering_gap: beta_t exceeds 1 - e^{-t} (invalid schedule)");
  }
  if (beta_t >= upper) return 0.0;
  const double gap = composite_simpson(
      [&](double u) { return (1.0 - u) * log_ratio_variance(tp, u); },
      beta_t, upper, 2001);
  return -gap;
}

double fr_tempering_gap(double t, const Fn1d& lambda, const TargetPair& tp, double beta_dt) {
  return fr_tempering_gap_from_beta(beta_of_t(lambda, t, beta_dt), t, tp);
}

double mirror_descent_kl_bound(const std::vector<double>& alphas, double kl_pi_mu0) {
  if (alphas.empty() || !(alphas.front() > 0.0)) {
    throw ModelError("mirror_descent_kl_bound: alpha_1 must be positive");
  }
  double prod = 1.0;
  for (double a : alphas) prod *= (1.0 - a);
  return prod / alphas.front() * kl_pi_mu0;
}

DiscreteBoundResult tempered_ula_kl_bound(int n, const std::vector<double>& gammas,
                        const std::vector<double>& lambdas,
                        const RegularityConstants& k, int dim, double kl0,
                        double a_prime) {
  if (n < 0) throw ModelError("tempered_ula_kl_bound: negative n");
  if (gammas.size() < static_cast<std::size_t>(n + 1) ||
      lambdas.size() < static_cast<std::size_t>(n + 1)) {
    throw ModelError("tempered_ula_kl_bound: need gamma_0..gamma_n and lambda_0..lambda_n");
  }
  const double d = static_cast<double>(dim);
  const auto c_at = [&](int i) {
    return (1.0 - lambdas[i]) * k.mu0.c + lambdas[i] * k.pi.c;
  };
  const auto l_at = [&](int i) {
    return (1.0 - lambdas[i]) * k.mu0.L + lambdas[i] * k.pi.L;
  };

  DiscreteBoundResult out;
  const double step_cap_global =
      std::min(1.0, std::min(k.pi.a, k.mu0.a) /
                        (2.0 * (k.pi.L + k.mu0.L) * (k.pi.L + k.mu0.L)));
  for (int i = 0; i <= n; ++i) {
    const double cap =
        std::min(step_cap_global, c_at(i) / (4.0 * l_at(i) * l_at(i)));
    if (gammas[i] > cap) out.step_size_ok = false;
  }

  // Decay sum over k = 1..n.
  double decay_sum = 0.0;
  for (int i = 1; i <= n; ++i) decay_sum += gammas[i] * c_at(i);
  double value = kl0 * std::exp(-decay_sum);

  // Bias terms k = 0..n-1, each discounted by exp(-sum_{i=1}^k gamma_i c_i).
  double partial = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i >= 1) partial += gammas[i] * c_at(i);
    const double lk = l_at(i);
    value += (6.0 * gammas[i] * gammas[i] * d * lk * lk +
              (1.0 - lambdas[i]) * a_prime) *
             std::exp(-partial);
  }
  out.value = value;
  return out;
}

}  // namespace temperflow
