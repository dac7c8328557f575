#pragma once

#include <utility>
#include <vector>

#include "temperflow/models.hpp"
#include "temperflow/schedules.hpp"

namespace temperflow {

struct MomentState {
  double t = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

enum class FlowBase { W, FR, WFR };

// Mean attractor of the tempered FR part.  `target_mean` is the ODE as
// displayed (the mean relaxes towards m_pi at every lambda); the
// `interpolant_mean` variant relaxes towards the geometric-interpolant mean,
// which makes the flow's solution exactly the path rho_{beta_t} and is the
// dynamics the particle samplers approximate.  The two coincide at
// lambda = 1 and for equal endpoint means.
enum class TfrAttractor { target_mean, interpolant_mean };

struct FlowKind {
  FlowBase base = FlowBase::W;
  bool tempered = false;
  FixedSchedule schedule;  // used only when tempered
  TfrAttractor fr_attractor = TfrAttractor::target_mean;

  static FlowKind untempered(FlowBase base) { return {base, false, {}}; }
  static FlowKind with_schedule(FlowBase base, FixedSchedule s,
                                TfrAttractor attractor = TfrAttractor::target_mean) {
    return {base, true, s, attractor};
  }
};

using MomentRhs = std::pair<Eigen::VectorXd, Eigen::MatrixXd>;

// Moment ODEs for the Gaussian flows.  The untempered right-hand sides take
// the target only; the tempered ones take the pair and the current lambda.
MomentRhs rhs_w(const MomentState& state, const GaussianDist& pi);
MomentRhs rhs_fr(const MomentState& state, const GaussianDist& pi);
MomentRhs rhs_tempered_w(const MomentState& state, const TargetPair& tp, double lambda);
MomentRhs rhs_tempered_fr(const MomentState& state, const TargetPair& tp, double lambda,
                          TfrAttractor attractor = TfrAttractor::target_mean);

// WFR right-hand side: element-wise sum of the W and FR parts.
MomentRhs rhs_combined(const MomentState& state, const TargetPair& tp,
                       double lambda, FlowBase base, bool tempered,
                       TfrAttractor attractor = TfrAttractor::target_mean);

struct MomentTrajectory {
  FlowKind flow;
  std::vector<MomentState> states;
};

// RK4 from (m0, Sigma0); any step whose covariance loses positive
// definiteness is retried with locally halved steps (up to 10 halvings)
// before raising a NumericsError naming the failing time.
MomentTrajectory integrate_flow(const FlowKind& kind, const TargetPair& tp,
                                double t_end, double dt);

// kl_gaussian against pi at every state.
std::vector<std::pair<double, double>> kl_along(const MomentTrajectory& traj,
                                                const GaussianDist& pi);

}  // namespace temperflow
