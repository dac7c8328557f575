#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "temperflow/closed_forms.hpp"
#include "temperflow/errors.hpp"
#include "temperflow/gaussian_flows.hpp"

using namespace temperflow;

namespace {

TargetPair far_narrow_pair() {
  return TargetPair::gaussian(GaussianDist::scalar(0.0, 1.0),
                              GaussianDist::scalar(20.0, 0.1));
}

TargetPair near_wide_pair() {
  return TargetPair::gaussian(GaussianDist::scalar(0.0, 1.0),
                              GaussianDist::scalar(1.0, 5.0));
}

GaussianDist random_gaussian(std::mt19937_64& gen, int d) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> eig(0.5, 2.0);
  Eigen::VectorXd mean(d);
  for (int i = 0; i < d; ++i) mean[i] = normal(gen);
  Eigen::MatrixXd q(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) q(i, j) = normal(gen);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  Eigen::MatrixXd basis = qr.householderQ();
  Eigen::VectorXd ev(d);
  for (int i = 0; i < d; ++i) ev[i] = eig(gen);
  Eigen::MatrixXd cov = basis * ev.asDiagonal() * basis.transpose();
  return GaussianDist::make(mean, 0.5 * (cov + cov.transpose()));
}

MomentState random_state(std::mt19937_64& gen, int d) {
  const auto g = random_gaussian(gen, d);
  return {0.0, g.mean, g.cov};
}

}  // namespace

TEST_CASE("rhs_w stationary at the target and 1D substitution") {
  const auto pi = GaussianDist::scalar(20.0, 0.1);
  const auto [dm0, dc0] = rhs_w({0.0, pi.mean, pi.cov}, pi);
  CHECK(dm0.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(dc0.cwiseAbs().maxCoeff() <= 1e-12);

  const auto [dm, dc] = rhs_w({0.0, Eigen::VectorXd::Zero(1),
                               Eigen::MatrixXd::Identity(1, 1)}, pi);
  CHECK(dm[0] == doctest::Approx(200.0).epsilon(1e-13));
  CHECK(dc(0, 0) == doctest::Approx(-18.0).epsilon(1e-13));
}

TEST_CASE("rhs_fr stationary and closed-form consistency") {
  const auto pi = GaussianDist::scalar(1.0, 5.0);
  const auto [dm0, dc0] = rhs_fr({0.0, pi.mean, pi.cov}, pi);
  CHECK(dm0.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(dc0.cwiseAbs().maxCoeff() <= 1e-12);

  // Sigma_t^{-1} = Sigma_pi^{-1} + e^{-t}(Sigma_0^{-1} - Sigma_pi^{-1})
  // satisfies the covariance ODE.
  const double var0 = 1.0, var_pi = 5.0;
  for (double t : {0.0, 0.7, 2.5}) {
    const double sig = closed1d::fr_var(t, var0, var_pi);
    const double fd = oracles::fd_derivative(
        [&](double s) { return closed1d::fr_var(s, var0, var_pi); }, t, 1e-6);
    const auto [dm, dc] = rhs_fr(
        {t, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, sig)}, pi);
    CHECK(dc(0, 0) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("FR mean for the unit-variance mean-shift pair is m(1 - e^{-t})") {
  const double m = 3.0;
  const auto tp = TargetPair::gaussian(GaussianDist::scalar(0.0, 1.0),
                                       GaussianDist::scalar(m, 1.0));
  const auto traj = integrate_flow(FlowKind::untempered(FlowBase::FR), tp, 5.0, 1e-3);
  for (std::size_t i = 0; i < traj.states.size(); i += 500) {
    const auto& s = traj.states[i];
    CHECK(s.mean[0] == doctest::Approx(m * (1.0 - std::exp(-s.t))).epsilon(1e-8));
  }
}

TEST_CASE("tempered RHS with lambda = 1 equals the untempered RHS") {
  std::mt19937_64 gen(5);
  const auto tp2 = TargetPair::gaussian(random_gaussian(gen, 2), random_gaussian(gen, 2));
  for (int rep = 0; rep < 50; ++rep) {
    const auto st = random_state(gen, 2);
    {
      const auto a = rhs_tempered_w(st, tp2, 1.0);
      const auto b = rhs_w(st, *tp2.pi_gauss);
      CHECK((a.first - b.first).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((a.second - b.second).cwiseAbs().maxCoeff() <= 1e-14);
    }
    {
      const auto a = rhs_tempered_fr(st, tp2, 1.0);
      const auto b = rhs_fr(st, *tp2.pi_gauss);
      CHECK((a.first - b.first).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((a.second - b.second).cwiseAbs().maxCoeff() <= 1e-14);
    }
    {
      const auto a = rhs_combined(st, tp2, 1.0, FlowBase::WFR, true);
      const auto w = rhs_w(st, *tp2.pi_gauss);
      const auto fr = rhs_fr(st, *tp2.pi_gauss);
      CHECK((a.first - w.first - fr.first).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((a.second - w.second - fr.second).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
}

TEST_CASE("tempered W: lambda = 0 is stationary at mu0; attractor at lambda = 1/2") {
  std::mt19937_64 gen(17);
  const auto tp = TargetPair::gaussian(random_gaussian(gen, 2), random_gaussian(gen, 2));
  const auto [dm, dc] =
      rhs_tempered_w({0.0, tp.mu0_gauss->mean, tp.mu0_gauss->cov}, tp, 0.0);
  CHECK(dm.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(dc.cwiseAbs().maxCoeff() <= 1e-12);

  const auto pair01 = TargetPair::gaussian(GaussianDist::scalar(0.0, 1.0),
                                           GaussianDist::scalar(2.0, 1.0));
  const auto [dm2, dc2] = rhs_tempered_w(
      {0.0, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)}, pair01, 0.5);
  CHECK(dm2[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dcov stays symmetric for symmetric states") {
  std::mt19937_64 gen(29);
  const auto tp = TargetPair::gaussian(random_gaussian(gen, 3), random_gaussian(gen, 3));
  for (int rep = 0; rep < 20; ++rep) {
    const auto st = random_state(gen, 3);
    for (double lambda : {0.0, 0.3, 1.0}) {
      for (auto base : {FlowBase::W, FlowBase::FR, FlowBase::WFR}) {
        const auto res = rhs_combined(st, tp, lambda, base, true);
        CHECK((res.second - res.second.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("rhs_combined equals the sum of its parts at random states") {
  std::mt19937_64 gen(41);
  const auto tp = TargetPair::gaussian(random_gaussian(gen, 2), random_gaussian(gen, 2));
  for (int rep = 0; rep < 20; ++rep) {
    const auto st = random_state(gen, 2);
    const double lambda = 0.25 + 0.5 * (rep / 20.0);
    const auto combined = rhs_combined(st, tp, lambda, FlowBase::WFR, true);
    const auto w = rhs_tempered_w(st, tp, lambda);
    const auto fr = rhs_tempered_fr(st, tp, lambda);
    CHECK((combined.first - w.first - fr.first).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((combined.second - w.second - fr.second).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("integrate_flow matches the 1D closed forms (linear schedule)") {
  for (const auto& tp : {far_narrow_pair(), near_wide_pair()}) {
    const double m0 = tp.mu0_gauss->mean[0], v0 = tp.mu0_gauss->cov(0, 0);
    const double mp = tp.pi_gauss->mean[0], vp = tp.pi_gauss->cov(0, 0);
    const FixedSchedule sched = FixedSchedule::linear(10.0);
    const closed1d::Tempered1d oracle(m0, v0, mp, vp, sched.fn(), 10.0);

    const auto w = integrate_flow(FlowKind::untempered(FlowBase::W), tp, 10.0, 1e-3);
    const auto fr = integrate_flow(FlowKind::untempered(FlowBase::FR), tp, 10.0, 1e-3);
    const auto tw =
        integrate_flow(FlowKind::with_schedule(FlowBase::W, sched), tp, 10.0, 1e-3);
    const auto tfr =
        integrate_flow(FlowKind::with_schedule(FlowBase::FR, sched), tp, 10.0, 1e-3);

    double err = 0.0;
    for (std::size_t i = 0; i < w.states.size(); i += 100) {
      const double t = w.states[i].t;
      err = std::max(err, std::abs(w.states[i].mean[0] - closed1d::w_mean(t, m0, mp, vp)));
      err = std::max(err, std::abs(w.states[i].cov(0, 0) - closed1d::w_var(t, v0, vp)));
      err = std::max(err,
                     std::abs(fr.states[i].mean[0] - closed1d::fr_mean(t, m0, mp, v0, vp)));
      err = std::max(err, std::abs(fr.states[i].cov(0, 0) - closed1d::fr_var(t, v0, vp)));
      err = std::max(err, std::abs(tw.states[i].mean[0] - oracle.tw_mean(t)));
      err = std::max(err, std::abs(tw.states[i].cov(0, 0) - oracle.tw_var(t)));
      err = std::max(err, std::abs(tfr.states[i].mean[0] - oracle.tfr_mean(t)));
      err = std::max(err, std::abs(tfr.states[i].cov(0, 0) - oracle.tfr_var(t)));
    }
    CHECK(err < 1e-6);
  }
}

TEST_CASE("interpolant-attractor tempered FR is exactly the path rho_beta") {
  std::mt19937_64 gen(71);
  const auto tp = TargetPair::gaussian(random_gaussian(gen, 2), random_gaussian(gen, 2));
  const auto sched = FixedSchedule::linear(6.0);
  const auto traj = integrate_flow(
      FlowKind::with_schedule(FlowBase::FR, sched, TfrAttractor::interpolant_mean),
      tp, 6.0, 1e-3);
  for (std::size_t i = 0; i < traj.states.size(); i += 500) {
    const auto& s = traj.states[i];
    const double beta = beta_of_t(sched, s.t, 1e-3);
    const auto rho = geometric_interpolant(tp, beta).dist;
    CHECK((s.cov - rho.cov).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((s.mean - rho.mean).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("tempered FR covariance follows the geometric path rho_beta") {
  // The covariance of the displayed tempered-FR ODE coincides with the
  // interpolant at alpha = beta_t for any Gaussian pair; the mean only does
  // when the endpoint means agree (the mean attractor stays at m_pi).
  std::mt19937_64 gen(53);
  auto mu0 = random_gaussian(gen, 2);
  auto pi = random_gaussian(gen, 2);
  pi.mean = mu0.mean;  // equal means: both moments must match
  const auto tp = TargetPair::gaussian(mu0, pi);
  const auto sched = FixedSchedule::linear(6.0);
  const auto traj =
      integrate_flow(FlowKind::with_schedule(FlowBase::FR, sched), tp, 6.0, 1e-3);
  for (std::size_t i = 0; i < traj.states.size(); i += 1000) {
    const auto& s = traj.states[i];
    const double beta = beta_of_t(sched, s.t, 1e-3);
    const auto rho = geometric_interpolant(tp, beta).dist;
    CHECK((s.cov - rho.cov).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((s.mean - rho.mean).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("kl_along starts at KL(mu0 || pi) and FR KL is non-increasing") {
  const auto tp = far_narrow_pair();
  const auto fr = integrate_flow(FlowKind::untempered(FlowBase::FR), tp, 10.0, 1e-3);
  const auto kl = kl_along(fr, *tp.pi_gauss);
  CHECK(kl.front().second ==
        doctest::Approx(kl_gaussian(*tp.mu0_gauss, *tp.pi_gauss)).epsilon(1e-12));
  for (std::size_t i = 1; i < kl.size(); ++i) {
    CHECK(kl[i].second <= kl[i - 1].second + 1e-10);
  }
}

TEST_CASE("standard FR is never slower than tempered FR along the grid") {
  const auto tp = far_narrow_pair();
  const auto sched = FixedSchedule::linear(10.0);
  const auto fr = integrate_flow(FlowKind::untempered(FlowBase::FR), tp, 10.0, 1e-3);
  const auto tfr =
      integrate_flow(FlowKind::with_schedule(FlowBase::FR, sched), tp, 10.0, 1e-3);
  const auto kl_fr = kl_along(fr, *tp.pi_gauss);
  const auto kl_tfr = kl_along(tfr, *tp.pi_gauss);
  for (std::size_t i = 0; i < kl_fr.size(); ++i) {
    CHECK(kl_fr[i].second <= kl_tfr[i].second + 1e-10);
  }
}

TEST_CASE("W vs FR ordering flips with the target conditioning") {
  const auto t1 = far_narrow_pair();
  const auto w1 = kl_along(
      integrate_flow(FlowKind::untempered(FlowBase::W), t1, 10.0, 1e-3), *t1.pi_gauss);
  const auto fr1 = kl_along(
      integrate_flow(FlowKind::untempered(FlowBase::FR), t1, 10.0, 1e-3), *t1.pi_gauss);
  for (std::size_t i : {std::size_t{5000}, std::size_t{10000}}) {  // t = 5, 10
    CHECK(w1[i].second < fr1[i].second);
  }

  const auto t2 = near_wide_pair();
  const auto w2 = kl_along(
      integrate_flow(FlowKind::untempered(FlowBase::W), t2, 10.0, 1e-3), *t2.pi_gauss);
  const auto fr2 = kl_along(
      integrate_flow(FlowKind::untempered(FlowBase::FR), t2, 10.0, 1e-3), *t2.pi_gauss);
  for (std::size_t i : {std::size_t{5000}, std::size_t{10000}}) {
    CHECK(fr2[i].second < w2[i].second);
  }
}

TEST_CASE("integrate_flow starts exactly at mu0 and advances a uniform grid") {
  const auto tp = near_wide_pair();
  const auto traj = integrate_flow(FlowKind::untempered(FlowBase::WFR), tp, 1.0, 0.01);
  CHECK(traj.states.front().mean[0] == tp.mu0_gauss->mean[0]);
  CHECK(traj.states.front().cov(0, 0) == tp.mu0_gauss->cov(0, 0));
  CHECK(traj.states.size() == 101);
  CHECK(traj.states.back().t == doctest::Approx(1.0));
}
