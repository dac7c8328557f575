#pragma once

#include "temperflow/quadrature.hpp"

namespace temperflow::closed1d {

// 1D closed forms of the Gaussian moment flows.  These are kept as a code
// path separate from the RK4 integrator so either side can check the other.

double w_mean(double t, double m0, double mpi, double var_pi);
double w_var(double t, double var0, double var_pi);

double fr_var(double t, double var0, double var_pi);
double fr_mean(double t, double m0, double mpi, double var0, double var_pi);

// Tempered closed forms; the time integrals are evaluated by quadrature on
// a precomputed fine grid of the schedule.
class Tempered1d {
 public:
  Tempered1d(double m0, double var0, double mpi, double var_pi, Fn1d lambda,
             double t_max, double grid_step = 1e-4);

  double tw_mean(double t) const;
  double tw_var(double t) const;
  // Target-mean tempered FR (mean attractor m_pi at every lambda).
  double tfr_mean(double t) const;
  double tfr_var(double t) const;

 private:
  double m0_, var0_, mpi_, var_pi_, q0_, qpi_;
  Fn1d lambda_;
  double t_max_;
  CumulativeIntegral big_g_;   // int_0^t P(s) ds,   P = (1-l) q0 + l qpi
  CumulativeIntegral exp_p_;   // int_0^t e^s P(s) ds

  double prec_at(double t) const;       // P(t)
  double tfr_precision(double t) const; // e^{-t} q0 + int e^{s-t} P(s) ds
};

}  // namespace temperflow::closed1d
