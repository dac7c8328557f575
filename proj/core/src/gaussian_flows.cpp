#include "temperflow/gaussian_flows.hpp"

#include <cmath>
#include <string>

#include "temperflow/errors.hpp"

namespace temperflow {

namespace {

// Precisions and natural means are fixed along a trajectory; factor them out
// of the per-step right-hand sides.
struct FlowContext {
  Eigen::MatrixXd q0, qpi;
  Eigen::VectorXd theta0, thetapi;
  const GaussianDist* mu0 = nullptr;
  const GaussianDist* pi = nullptr;

  static FlowContext make(const TargetPair& tp) {
    if (!tp.both_gaussian()) {
      throw ModelError("gaussian_flows: Gaussian descriptors required");
    }
    FlowContext ctx;
    ctx.mu0 = &*tp.mu0_gauss;
    ctx.pi = &*tp.pi_gauss;
    ctx.q0 = ctx.mu0->precision();
    ctx.qpi = ctx.pi->precision();
    ctx.theta0 = ctx.q0 * ctx.mu0->mean;
    ctx.thetapi = ctx.qpi * ctx.pi->mean;
    return ctx;
  }
};

MomentRhs rhs_w_impl(const MomentState& s, const Eigen::MatrixXd& prec,
                     const Eigen::VectorXd& target_mean) {
  Eigen::VectorXd dmean = -(prec * (s.mean - target_mean));
  Eigen::MatrixXd dcov = -(prec * s.cov) - (s.cov * prec);
  dcov.diagonal().array() += 2.0;
  return {std::move(dmean), std::move(dcov)};
}

MomentRhs rhs_fr_impl(const MomentState& s, const Eigen::MatrixXd& prec,
                      const Eigen::VectorXd& target_mean) {
  Eigen::VectorXd dmean = -(s.cov * (prec * (s.mean - target_mean)));
  Eigen::MatrixXd dcov = -(s.cov * prec * s.cov) + s.cov;
  return {std::move(dmean), std::move(dcov)};
}

MomentRhs rhs_tempered_w_impl(const MomentState& s, const FlowContext& ctx,
                              double lambda) {
  if (lambda == 1.0) return rhs_w_impl(s, ctx.qpi, ctx.pi->mean);
  if (lambda == 0.0) return rhs_w_impl(s, ctx.q0, ctx.mu0->mean);
  const Eigen::MatrixXd prec = lambda * ctx.qpi + (1.0 - lambda) * ctx.q0;
  // -P (m - a) with a the interpolant mean collapses to theta-form.
  const Eigen::VectorXd theta = lambda * ctx.thetapi + (1.0 - lambda) * ctx.theta0;
  Eigen::VectorXd dmean = -(prec * s.mean - theta);
  Eigen::MatrixXd dcov = -(prec * s.cov) - (s.cov * prec);
  dcov.diagonal().array() += 2.0;
  return {std::move(dmean), std::move(dcov)};
}

// Tempered FR part.  With `target_mean` the mean attractor stays at m_pi
// for every lambda (the displayed ODE); with `interpolant_mean` the
// attractor is the geometric-interpolant mean, -Sigma P m + Sigma theta in
// natural-parameter form, whose solution is rho_{beta_t}.
MomentRhs rhs_tempered_fr_impl(const MomentState& s, const FlowContext& ctx,
                               double lambda, TfrAttractor attractor) {
  if (lambda == 1.0) return rhs_fr_impl(s, ctx.qpi, ctx.pi->mean);
  const Eigen::MatrixXd prec = lambda * ctx.qpi + (1.0 - lambda) * ctx.q0;
  if (attractor == TfrAttractor::target_mean) {
    return rhs_fr_impl(s, prec, ctx.pi->mean);
  }
  const Eigen::VectorXd theta = lambda * ctx.thetapi + (1.0 - lambda) * ctx.theta0;
  Eigen::VectorXd dmean = -(s.cov * (prec * s.mean - theta));
  Eigen::MatrixXd dcov = -(s.cov * prec * s.cov) + s.cov;
  return {std::move(dmean), std::move(dcov)};
}

MomentRhs rhs_dispatch(const MomentState& s, const FlowContext& ctx,
                       double lambda, FlowBase base, bool tempered,
                       TfrAttractor attractor) {
  switch (base) {
    case FlowBase::W:
      return tempered ? rhs_tempered_w_impl(s, ctx, lambda)
                      : rhs_w_impl(s, ctx.qpi, ctx.pi->mean);
    case FlowBase::FR:
      return tempered ? rhs_tempered_fr_impl(s, ctx, lambda, attractor)
                      : rhs_fr_impl(s, ctx.qpi, ctx.pi->mean);
    case FlowBase::WFR: {
      auto w = tempered ? rhs_tempered_w_impl(s, ctx, lambda)
                        : rhs_w_impl(s, ctx.qpi, ctx.pi->mean);
      auto fr = tempered ? rhs_tempered_fr_impl(s, ctx, lambda, attractor)
                         : rhs_fr_impl(s, ctx.qpi, ctx.pi->mean);
      return {w.first + fr.first, w.second + fr.second};
    }
  }
  throw ModelError("rhs_dispatch: unknown flow base");
}

bool is_pd(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  return llt.info() == Eigen::Success;
}

}  // namespace

MomentRhs rhs_w(const MomentState& state, const GaussianDist& pi) {
  return rhs_w_impl(state, pi.precision(), pi.mean);
}

MomentRhs rhs_fr(const MomentState& state, const GaussianDist& pi) {
  return rhs_fr_impl(state, pi.precision(), pi.mean);
}

MomentRhs rhs_tempered_w(const MomentState& state, const TargetPair& tp, double lambda) {
  return rhs_tempered_w_impl(state, FlowContext::make(tp), lambda);
}

MomentRhs rhs_tempered_fr(const MomentState& state, const TargetPair& tp, double lambda,
                          TfrAttractor attractor) {
  return rhs_tempered_fr_impl(state, FlowContext::make(tp), lambda, attractor);
}

MomentRhs rhs_combined(const MomentState& state, const TargetPair& tp,
                       double lambda, FlowBase base, bool tempered,
                       TfrAttractor attractor) {
  return rhs_dispatch(state, FlowContext::make(tp), lambda, base, tempered, attractor);
}

namespace {

MomentState rk4_step(const MomentState& s, double h, const FlowContext& ctx,
                     const FlowKind& kind) {
  const auto lam = [&](double t) {
    return kind.tempered ? kind.schedule.eval(t) : 1.0;
  };
  const auto eval = [&](const MomentState& x, double t) {
    return rhs_dispatch(x, ctx, lam(t), kind.base, kind.tempered, kind.fr_attractor);
  };
  const auto k1 = eval(s, s.t);
  const MomentState s2{s.t, s.mean + 0.5 * h * k1.first, s.cov + 0.5 * h * k1.second};
  const auto k2 = eval(s2, s.t + 0.5 * h);
  const MomentState s3{s.t, s.mean + 0.5 * h * k2.first, s.cov + 0.5 * h * k2.second};
  const auto k3 = eval(s3, s.t + 0.5 * h);
  const MomentState s4{s.t, s.mean + h * k3.first, s.cov + h * k3.second};
  const auto k4 = eval(s4, s.t + h);

  MomentState out;
  out.t = s.t + h;
  out.mean = s.mean + h / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
  out.cov = s.cov + h / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

MomentState advance(const MomentState& s, double h, const FlowContext& ctx,
                    const FlowKind& kind, int depth) {
  MomentState next = rk4_step(s, h, ctx, kind);
  if (is_pd(next.cov)) return next;
  if (depth >= 10) {
    throw NumericsError("integrate_flow: covariance lost PD at t = " +
                        std::to_string(s.t + h) + " after 10 step halvings");
  }
  MomentState half = advance(s, 0.5 * h, ctx, kind, depth + 1);
  return advance(half, 0.5 * h, ctx, kind, depth + 1);
}

}  // namespace

MomentTrajectory integrate_flow(const FlowKind& kind, const TargetPair& tp,
                                double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) {
    throw ModelError("integrate_flow: bad grid");
  }
  const FlowContext ctx = FlowContext::make(tp);
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));

  MomentTrajectory traj;
  traj.flow = kind;
  traj.states.reserve(steps + 1);
  traj.states.push_back({0.0, ctx.mu0->mean, ctx.mu0->cov});
  for (std::size_t i = 0; i < steps; ++i) {
    MomentState next = advance(traj.states.back(), dt, ctx, kind, 0);
    next.t = dt * static_cast<double>(i + 1);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

std::vector<std::pair<double, double>> kl_along(const MomentTrajectory& traj,
                                                const GaussianDist& pi) {
  std::vector<std::pair<double, double>> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    out.emplace_back(s.t, kl_gaussian(GaussianDist{s.mean, s.cov}, pi));
  }
  return out;
}

}  // namespace temperflow
