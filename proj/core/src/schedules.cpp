#include "temperflow/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "temperflow/errors.hpp"

namespace temperflow {

namespace {

constexpr double kLambdaOne = 1.0 - 1e-12;
constexpr double kZeroVariance = 1e-14;

double checked_time(double t) {
  if (t < 0.0) throw ModelError("schedule evaluated at negative time");
  return t;
}

}  // namespace

FixedSchedule FixedSchedule::linear(double horizon) {
  if (!(horizon > 0.0)) throw ModelError("linear schedule needs horizon T > 0");
  return {FixedKind::linear, horizon, 1.0};
}

FixedSchedule FixedSchedule::exponential(double rate) {
  if (!(rate > 0.0)) throw ModelError("exponential schedule needs rate > 0");
  return {FixedKind::exponential, 1.0, rate};
}

double FixedSchedule::eval(double t) const {
  checked_time(t);
  switch (kind) {
    case FixedKind::constant_one:
      return 1.0;
    case FixedKind::linear:
      return t >= horizon ? 1.0 : t / horizon;
    case FixedKind::exponential:
      return 1.0 - std::exp(-rate * t);
    case FixedKind::chehab:
      return 1.0 - 1.0 / (2.0 + t);
  }
  return 1.0;
}

Fn1d FixedSchedule::fn() const {
  return [s = *this](double t) { return s.eval(t); };
}

double beta_of_t(const Fn1d& lambda, double t_end, double dt) {
  if (!(dt > 0.0) || t_end < 0.0) throw ModelError("beta_of_t: bad grid");
  double beta = 0.0;
  double t = 0.0;
  const auto rhs = [&lambda](double time, double b) { return lambda(time) - b; };
  while (t < t_end - 1e-15) {
    const double h = std::min(dt, t_end - t);
    const double k1 = rhs(t, beta);
    const double k2 = rhs(t + 0.5 * h, beta + 0.5 * h * k1);
    const double k3 = rhs(t + 0.5 * h, beta + 0.5 * h * k2);
    const double k4 = rhs(t + h, beta + h * k3);
    beta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return beta;
}

double beta_of_t(const FixedSchedule& schedule, double t_end, double dt) {
  return beta_of_t(schedule.fn(), t_end, dt);
}

double gradflow_rhs(double lambda, double mu_mean_logratio, const TargetPair& tp) {
  const double l = std::clamp(lambda, 0.0, 1.0);
  return expected_log_ratio(tp, l) - mu_mean_logratio +
         (1.0 - l) * log_ratio_variance(tp, l);
}

std::optional<double> constant_kl_rhs(double lambda, const TargetPair& tp,
                                      double beta_param) {
  if (lambda >= kLambdaOne) return std::nullopt;
  const double var = log_ratio_variance(tp, std::clamp(lambda, 0.0, 1.0));
  if (var <= kZeroVariance) return std::nullopt;
  return beta_param / ((1.0 - lambda) * var);
}

std::optional<double> ess_rhs(double lambda, const TargetPair& tp,
                              double beta_param) {
  const double var = log_ratio_variance(tp, std::clamp(lambda, 0.0, 1.0));
  if (var <= kZeroVariance) return std::nullopt;
  return std::sqrt(beta_param) / std::sqrt(var);
}

namespace {

// One RK4 stage of the (lambda, beta) system; nullopt when the schedule has
// completed (either signalled by the variant or lambda >= 1).
struct StageRates {
  double dlambda = 0.0;
  double dbeta = 0.0;
};

std::optional<StageRates> schedule_rates(const AdaptiveScheduleState& st,
                                         const TargetPair& tp, double lambda,
                                         double beta) {
  if (lambda >= kLambdaOne) return std::nullopt;
  const double l = std::clamp(lambda, 0.0, 1.0);
  const double b = std::clamp(beta, 0.0, 1.0);
  switch (st.variant) {
    case AdaptiveVariant::grad_flow: {
      const double mu_mean = expected_log_ratio(tp, b);
      return StageRates{gradflow_rhs(l, mu_mean, tp), l - b};
    }
    case AdaptiveVariant::constant_kl: {
      auto r = constant_kl_rhs(l, tp, st.beta_param);
      if (!r) return std::nullopt;
      return StageRates{*r, l - b};
    }
    case AdaptiveVariant::ess: {
      auto r = ess_rhs(l, tp, st.beta_param);
      if (!r) return std::nullopt;
      return StageRates{*r, l - b};
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<SchedulePoint> integrate_schedule(AdaptiveScheduleState state,
                                              const TargetPair& tp,
                                              double t_end, double dt) {
  if (!(dt > 0.0) || t_end < 0.0) throw ModelError("integrate_schedule: bad grid");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));

  std::vector<SchedulePoint> out;
  out.reserve(steps + 1);
  double lambda = std::clamp(state.lambda, 0.0, 1.0);
  double beta = 0.0;
  bool complete = lambda >= kLambdaOne;
  out.push_back({state.t, complete ? 1.0 : lambda});

  for (std::size_t i = 0; i < steps; ++i) {
    const double t = state.t + dt * static_cast<double>(i + 1);
    if (!complete) {
      const double prev = lambda;
      const auto k1 = schedule_rates(state, tp, lambda, beta);
      const auto k2 = !k1 ? k1
                          : schedule_rates(state, tp, lambda + 0.5 * dt * k1->dlambda,
                                           beta + 0.5 * dt * k1->dbeta);
      const auto k3 = !k2 ? k2
                          : schedule_rates(state, tp, lambda + 0.5 * dt * k2->dlambda,
                                           beta + 0.5 * dt * k2->dbeta);
      const auto k4 = !k3 ? k3
                          : schedule_rates(state, tp, lambda + dt * k3->dlambda,
                                           beta + dt * k3->dbeta);
      if (!k1 || !k2 || !k3 || !k4) {
        lambda = 1.0;
        complete = true;
      } else {
        lambda += dt / 6.0 *
                  (k1->dlambda + 2.0 * k2->dlambda + 2.0 * k3->dlambda + k4->dlambda);
        beta += dt / 6.0 *
                (k1->dbeta + 2.0 * k2->dbeta + 2.0 * k3->dbeta + k4->dbeta);
        if (std::isnan(lambda) || std::isnan(beta)) {
          throw NumericsError("integrate_schedule: NaN in RHS at t = " +
                              std::to_string(t));
        }
        if (lambda < prev - 1e-12) {
          throw NumericsError(
              "integrate_schedule: schedule decreased at t = " + std::to_string(t) +
              " (lambda " + std::to_string(prev) + " -> " + std::to_string(lambda) + ")");
        }
        if (lambda >= 1.0) {
          lambda = 1.0;
          complete = true;
        }
      }
    }
    out.push_back({t, lambda});
  }
  return out;
}

double gradflow_closed_form_meanshift(double m, double t) {
  const double m2 = m * m;
  if (m2 > 0.25 + 1e-15) {
    throw ModelError("gradflow_closed_form_meanshift: m^2 > 1/4 (complex roots)");
  }
  if (std::abs(m2 - 0.25) <= 1e-14) {
    return 1.0 - (1.0 - 0.5 * t) * std::exp(-0.5 * t);
  }
  const double disc = std::sqrt(1.0 - 4.0 * m2);
  const double r1 = 0.5 * (-1.0 + disc);
  const double r2 = 0.5 * (-1.0 - disc);
  return 1.0 - (m2 + r2) / (r2 - r1) * std::exp(r1 * t) -
         (m2 + r1) / (r1 - r2) * std::exp(r2 * t);
}

std::vector<double> discrete_alpha(const std::vector<double>& gammas,
                                   const std::vector<double>& lambdas) {
  if (gammas.size() != lambdas.size()) {
    throw ModelError("discrete_alpha: sequences must have equal length");
  }
  std::vector<double> alphas(gammas.size());
  double alpha = 0.0;
  for (std::size_t n = 0; n < gammas.size(); ++n) {
    const double g = gammas[n];
    const double l = lambdas[n];
    if (!(g > 0.0) || g > 1.0) throw ModelError("discrete_alpha: gamma outside (0,1]");
    if (l < 0.0 || l > 1.0) throw ModelError("discrete_alpha: lambda outside [0,1]");
    alpha = (1.0 - g) * alpha + g * l;
    alphas[n] = alpha;
  }
  return alphas;
}

}  // namespace temperflow
