#pragma once

#include <optional>
#include <vector>

#include "temperflow/models.hpp"
#include "temperflow/quadrature.hpp"

namespace temperflow {

// Fixed tempering schedules lambda_t: constant 1, linear ramp t/T, the
// exponential rate 1 - e^{-at}, and 1 - 1/(2+t).
enum class FixedKind { constant_one, linear, exponential, chehab };

struct FixedSchedule {
  FixedKind kind = FixedKind::constant_one;
  double horizon = 1.0;  // linear only
  double rate = 1.0;     // exponential only

  static FixedSchedule constant_one() { return {FixedKind::constant_one}; }
  static FixedSchedule linear(double horizon);
  static FixedSchedule exponential(double rate);
  static FixedSchedule chehab() { return {FixedKind::chehab}; }

  double eval(double t) const;
  Fn1d fn() const;
  // True when eval is constant on every interval (used to take the kappa
  // exponent in closed form).
  bool is_constant() const { return kind == FixedKind::constant_one; }
};

// beta_t = int_0^t e^{s-t} lambda_s ds, solved as beta' = lambda - beta,
// beta_0 = 0, with classical RK4 at fixed step.
double beta_of_t(const Fn1d& lambda, double t_end, double dt);
double beta_of_t(const FixedSchedule& schedule, double t_end, double dt);

enum class AdaptiveVariant { grad_flow, constant_kl, ess };

struct AdaptiveScheduleState {
  AdaptiveVariant variant = AdaptiveVariant::grad_flow;
  double lambda = 0.0;
  double t = 0.0;
  double beta_param = 1.0;  // constant_kl / ess decay parameter
};

// Right-hand side of the steepest-descent schedule ODE coupled to a flow
// with E_{mu_t}[log pi/mu0] = mu_mean_logratio:
//   E_{pi_lambda}[log pi/mu0] - mu_mean_logratio
//     + (1-lambda) Var_{pi_lambda}(log mu0/pi).
// The sign of the expectation difference follows the closed-form solution
// lambda' = m^2 (1 - beta_t) of the Gaussian mean-shift case.
double gradflow_rhs(double lambda, double mu_mean_logratio, const TargetPair& tp);

// lambda' = beta / ((1-lambda) Var_{pi_lambda}(log mu0/pi)); nullopt signals
// schedule completion (lambda frozen at 1).
std::optional<double> constant_kl_rhs(double lambda, const TargetPair& tp,
                                      double beta_param);

// lambda' = sqrt(beta) Var_{pi_lambda}(log mu0/pi)^{-1/2}; nullopt signals
// completion.
std::optional<double> ess_rhs(double lambda, const TargetPair& tp,
                              double beta_param);

struct SchedulePoint {
  double t = 0.0;
  double lambda = 0.0;
};

// RK4 trajectory of an adaptive schedule; lambda is clamped to [0,1] and
// freezes once it reaches 1.  The grad_flow variant is coupled to the exact
// geometric-path flow mu_t = rho_{beta_t} (beta' = lambda - beta), which for
// Gaussian endpoints supplies E_{mu_t}[log pi/mu0] in closed form.
std::vector<SchedulePoint> integrate_schedule(AdaptiveScheduleState state,
                                              const TargetPair& tp,
                                              double t_end, double dt);

// Closed-form steepest-descent schedule for mu0 = N(0,1), pi = N(m,1):
// roots r = (-1 ± sqrt(1-4m^2))/2; at m^2 = 1/4 the degenerate form
// 1 - (1 - t/2)e^{-t/2}.  m^2 > 1/4 has no real-root solution.
double gradflow_closed_form_meanshift(double m, double t);

// alpha_n = sum_k gamma_k lambda_{k-1} prod_{j>k} (1-gamma_j), computed by
// the recursion alpha_n = (1-gamma_n) alpha_{n-1} + gamma_n lambda_{n-1}.
// gammas[i] is gamma_{i+1}; lambdas[i] is lambda_i; returns (alpha_1..alpha_n).
std::vector<double> discrete_alpha(const std::vector<double>& gammas,
                                   const std::vector<double>& lambdas);

}  // namespace temperflow
