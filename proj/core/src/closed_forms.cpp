#include "temperflow/closed_forms.hpp"

#include <cmath>
#include <utility>

#include "temperflow/errors.hpp"

namespace temperflow::closed1d {

double w_mean(double t, double m0, double mpi, double var_pi) {
  const double decay = std::exp(-t / var_pi);
  return decay * m0 + (1.0 - decay) * mpi;
}

double w_var(double t, double var0, double var_pi) {
  // e^{-2t/varpi}[var0 + varpi(e^{2t/varpi}-1)], expanded to avoid overflow.
  const double decay = std::exp(-2.0 * t / var_pi);
  return var0 * decay + var_pi * (1.0 - decay);
}

double fr_var(double t, double var0, double var_pi) {
  return 1.0 / (1.0 / var_pi + std::exp(-t) * (1.0 / var0 - 1.0 / var_pi));
}

double fr_mean(double t, double m0, double mpi, double var0, double var_pi) {
  return mpi + std::exp(-t) * fr_var(t, var0, var_pi) / var0 * (m0 - mpi);
}

Tempered1d::Tempered1d(double m0, double var0, double mpi, double var_pi,
                       Fn1d lambda, double t_max, double grid_step)
    : m0_(m0), var0_(var0), mpi_(mpi), var_pi_(var_pi),
      q0_(1.0 / var0), qpi_(1.0 / var_pi),
      lambda_(std::move(lambda)), t_max_(t_max) {
  if (!(var0 > 0.0) || !(var_pi > 0.0)) {
    throw ModelError("Tempered1d: variances must be positive");
  }
  if (t_max > 300.0) {
    throw ModelError("Tempered1d: horizon too large for the e^s weights");
  }
  const auto prec = [this](double s) { return prec_at(s); };
  big_g_ = cumulative_integral(prec, t_max, grid_step);
  exp_p_ = cumulative_integral([&prec](double s) { return std::exp(s) * prec(s); },
                               t_max, grid_step);
}

double Tempered1d::prec_at(double t) const {
  const double l = lambda_(t);
  return (1.0 - l) * q0_ + l * qpi_;
}

double Tempered1d::tw_mean(double t) const {
  const double gt = big_g_.at(t);
  const auto integrand = [&](double u) {
    const double l = lambda_(u);
    const double drive = (1.0 - l) * q0_ * m0_ + l * qpi_ * mpi_;
    return drive * std::exp(big_g_.at(u) - gt);
  };
  return m0_ * std::exp(-gt) + adaptive_simpson(integrand, 0.0, t, 1e-11);
}

double Tempered1d::tw_var(double t) const {
  const double gt = big_g_.at(t);
  const auto integrand = [&](double u) {
    return std::exp(2.0 * (big_g_.at(u) - gt));
  };
  return var0_ * std::exp(-2.0 * gt) + 2.0 * adaptive_simpson(integrand, 0.0, t, 1e-11);
}

double Tempered1d::tfr_precision(double t) const {
  return std::exp(-t) * (q0_ + exp_p_.at(t));
}

double Tempered1d::tfr_var(double t) const { return 1.0 / tfr_precision(t); }

double Tempered1d::tfr_mean(double t) const {
  const auto integrand = [&](double s) {
    return prec_at(s) / tfr_precision(s);
  };
  const double expo = adaptive_simpson(integrand, 0.0, t, 1e-11);
  return mpi_ + std::exp(-expo) * (m0_ - mpi_);
}

}  // namespace temperflow::closed1d
