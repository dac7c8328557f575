#pragma once

#include <vector>

#include "temperflow/models.hpp"
#include "temperflow/quadrature.hpp"
#include "temperflow/schedules.hpp"

namespace temperflow {

// Strong-convexity / Lipschitz constants of one negative log-density,
// plus the derived dissipativity pair (a, b).
struct DistConstants {
  double c = 0.0;  // strong convexity
  double L = 0.0;  // gradient Lipschitz
  double a = 0.0;  // dissipativity slope
  double b = 0.0;  // dissipativity offset
};

struct RegularityConstants {
  DistConstants pi;
  DistConstants mu0;
};

// For a Gaussian: c and L are the extreme eigenvalues of the precision, and
// (a, b) follow the Young's-inequality construction with epsilon = 1/c
// (a = c/2, b = |∇V(0)|^2 / (2c)).
DistConstants constants_for_gaussian(const GaussianDist& g);

// Quadratic-envelope constants for the ratio assumption
// e^{-M(1+|x|^2)} <= mu0/pi <= e^{M(1+|x|^2)}, and the second-moment bound B,
// for Gaussian endpoints.
struct FrConstants {
  double M = 0.0;
  double B = 0.0;
};
FrConstants fr_assumption_constants(const GaussianDist& mu0, const GaussianDist& pi);

// The bias constant of the continuous-time tempered-W bound:
// d(L0 - c_pi) + 4 max(Lpi^2, L0^2) (max(E_mu0|x|^2, (d+b0+bpi)/(a0^ api))
//                                    + max(bpi/api, b0/a0)).
double tempered_w_bias_constant(const RegularityConstants& k, int dim, double second_moment_mu0);

// The bias constant of the discrete-time bound:
// 2 L0 b0/a0 + 2 Lpi bpi/api
//  + 2 (L0+Lpi) max(E_mu0|x|^2, 2(3(b0+bpi)/2 + d)/(a0 ^ api ^ 1)).
double tempered_ula_bias_constant(const RegularityConstants& k, int dim,
                        double second_moment_mu0);

// e^{-2 t c_pi} KL0 + A ∫_0^t e^{-2(t-s) c_pi} (1-lambda_s) ds
// (time integral by adaptive Simpson at tol 1e-9).
double tempered_w_kl_bound(double t, const Fn1d& lambda, double c_pi, double kl0, double A);

// M (1-beta) [2 + B + B exp(M (1+B) (1-beta))].
double tempered_fr_kl_bound(double beta_t, double M, double B);

// -∫_{beta_t}^{1-e^{-t}} (1-u) Var_{rho_u}(log mu0/pi) du, composite Simpson
// with 2001 nodes; always <= 0.  Gaussian endpoints required.
double fr_tempering_gap_from_beta(double beta_t, double t, const TargetPair& tp);
double fr_tempering_gap(double t, const Fn1d& lambda, const TargetPair& tp,
                  double beta_dt = 1e-3);

// (alpha_1)^{-1} prod_k (1-alpha_k) KL(pi||mu0).
double mirror_descent_kl_bound(const std::vector<double>& alphas, double kl_pi_mu0);

// Discrete tempered-ULA bound.  gammas and lambdas are indexed 0..n (the
// decay sum uses gamma_1..gamma_n with c_k = c(lambda_k); the bias sum uses
// index k = 0..n-1).  step_size_ok reports the
// gamma_n <= min(1, (api^a0)/(2(Lpi+L0)^2), c_n/(4 L_n^2)) condition.
struct DiscreteBoundResult {
  double value = 0.0;
  bool step_size_ok = true;
};
DiscreteBoundResult tempered_ula_kl_bound(int n, const std::vector<double>& gammas,
                        const std::vector<double>& lambdas,
                        const RegularityConstants& k, int dim, double kl0,
                        double a_prime);

}  // namespace temperflow
