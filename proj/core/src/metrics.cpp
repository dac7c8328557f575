#include "temperflow/metrics.hpp"

#include <cmath>

#include "temperflow/errors.hpp"
#include "temperflow/util.hpp"

namespace temperflow {

namespace {

double kernel_cross_sum(const Eigen::MatrixXd& a, const Eigen::VectorXd* wa,
                        const Eigen::MatrixXd& b, double inv2bw2,
                        std::vector<double>& row_buf) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.rows());
  const int d = static_cast<int>(a.cols());
  row_buf.assign(static_cast<std::size_t>(n), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      double sq = 0.0;
      for (int k = 0; k < d; ++k) {
        const double diff = a(i, k) - b(j, k);
        sq += diff * diff;
      }
      acc += std::exp(-sq * inv2bw2);
    }
    row_buf[ii] = wa ? (*wa)[i] * acc : acc;
  });
  double total = 0.0;
  for (double v : row_buf) total += v;
  return total;
}

// Sum_{i,j} w_i w_j k(x_i, x_j), optionally with the diagonal removed.
double kernel_self_sum(const Eigen::MatrixXd& a, const Eigen::VectorXd* w,
                       double inv2bw2, bool drop_diagonal,
                       std::vector<double>& row_buf) {
  const int n = static_cast<int>(a.rows());
  const int d = static_cast<int>(a.cols());
  row_buf.assign(static_cast<std::size_t>(n), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (drop_diagonal && j == i) continue;
      double sq = 0.0;
      for (int k = 0; k < d; ++k) {
        const double diff = a(i, k) - a(j, k);
        sq += diff * diff;
      }
      const double kij = std::exp(-sq * inv2bw2);
      acc += w ? (*w)[j] * kij : kij;
    }
    row_buf[ii] = w ? (*w)[i] * acc : acc;
  });
  double total = 0.0;
  for (double v : row_buf) total += v;
  return total;
}

}  // namespace

double mmd_reference_term(const Eigen::MatrixXd& reference, const MmdConfig& cfg) {
  if (reference.rows() == 0) throw ModelError("mmd2: empty reference sample");
  const double inv2bw2 = 0.5 / (cfg.bandwidth * cfg.bandwidth);
  const auto m = static_cast<double>(reference.rows());
  std::vector<double> buf;
  if (cfg.estimator == MmdEstimator::v_statistic) {
    return kernel_self_sum(reference, nullptr, inv2bw2, false, buf) / (m * m);
  }
  return kernel_self_sum(reference, nullptr, inv2bw2, true, buf) / (m * (m - 1.0));
}

double mmd2_with_reference_term(const ParticleSystem& ps,
                                const Eigen::MatrixXd& reference,
                                const MmdConfig& cfg, double reference_term) {
  if (!(cfg.bandwidth > 0.0)) throw ModelError("mmd2: bandwidth must be positive");
  if (ps.dim() != reference.cols()) throw ModelError("mmd2: dimension mismatch");
  if (ps.count() == 0 || reference.rows() == 0) throw ModelError("mmd2: empty sample");
  const double inv2bw2 = 0.5 / (cfg.bandwidth * cfg.bandwidth);
  const auto m = static_cast<double>(reference.rows());
  std::vector<double> buf;

  double self;
  if (cfg.estimator == MmdEstimator::v_statistic) {
    self = kernel_self_sum(ps.positions, &ps.weights, inv2bw2, false, buf);
  } else {
    const double with_diag =
        kernel_self_sum(ps.positions, &ps.weights, inv2bw2, true, buf);
    const double w2 = ps.weights.squaredNorm();
    if (w2 >= 1.0) throw ModelError("mmd2: u_statistic needs more than one particle");
    self = with_diag / (1.0 - w2);
  }
  const double cross =
      kernel_cross_sum(ps.positions, &ps.weights, reference, inv2bw2, buf) / m;
  return self + reference_term - 2.0 * cross;
}

double mmd2(const ParticleSystem& ps, const Eigen::MatrixXd& reference,
            const MmdConfig& cfg) {
  return mmd2_with_reference_term(ps, reference, cfg,
                                  mmd_reference_term(reference, cfg));
}

double empirical_log_ratio_variance(const ParticleSystem& ps, const TargetPair& tp) {
  const int n = ps.count();
  Eigen::VectorXd vals(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = ps.positions.row(i).transpose();
    vals[i] = tp.mu0.logpdf(x) - tp.pi.logpdf(x);
    if (!std::isfinite(vals[i])) {
      throw NumericsError("empirical_log_ratio_variance: non-finite log-density at particle " +
                          std::to_string(i));
    }
  }
  const double mean = ps.weights.dot(vals);
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = vals[i] - mean;
    var += ps.weights[i] * c * c;
  }
  return var;
}

std::optional<std::size_t> iterations_to_threshold(const std::vector<double>& metric,
                                                   double threshold) {
  for (std::size_t i = 0; i < metric.size(); ++i) {
    if (metric[i] < threshold) return i;
  }
  return std::nullopt;
}

}  // namespace temperflow
