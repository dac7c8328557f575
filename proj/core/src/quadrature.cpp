#include "temperflow/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace temperflow {

double composite_simpson(const Fn1d& f, double a, double b, int nodes) {
  if (nodes < 3 || nodes % 2 == 0) {
    throw std::invalid_argument("composite_simpson: nodes must be odd and >= 3");
  }
  if (a == b) return 0.0;
  const int n = nodes - 1;  // even panel count
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

namespace {

double simpson_panel(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const Fn1d& f, double a, double fa, double b, double fb,
                     double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_panel(a, fa, m, fm, flm);
  const double right = simpson_panel(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const Fn1d& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson_panel(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double gauss_legendre_16(const Fn1d& f, double a, double b) {
  // Abscissae/weights for n=16 on [-1, 1].
  static const double x[8] = {
      0.0950125098376374401853193, 0.2816035507792589132304605,
      0.4580167776572273863424194, 0.6178762444026437484466718,
      0.7554044083550030338951012, 0.8656312023878317438804679,
      0.9445750230732325760779884, 0.9894009349916499325961542};
  static const double w[8] = {
      0.1894506104550684962853967, 0.1826034150449235888667637,
      0.1691565193950025381893121, 0.1495959888165767320815017,
      0.1246289712555338720524763, 0.0951585116824927848099251,
      0.0622535239386478928628438, 0.0271524594117540948517806};
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    sum += w[i] * (f(c - hw * x[i]) + f(c + hw * x[i]));
  }
  return sum * hw;
}

double CumulativeIntegral::at(double t) const {
  if (grid.empty()) return 0.0;
  if (t <= 0.0) return grid.front();
  const double last = t_end();
  if (t >= last) return grid.back();
  const double u = t / h;
  const auto i = static_cast<std::size_t>(u);
  const double frac = u - static_cast<double>(i);
  return grid[i] + frac * (grid[i + 1] - grid[i]);
}

CumulativeIntegral cumulative_integral(const Fn1d& f, double t_end, double h) {
  if (h <= 0.0 || t_end < 0.0) {
    throw std::invalid_argument("cumulative_integral: bad grid");
  }
  const auto n = static_cast<std::size_t>(std::ceil(t_end / h - 1e-12));
  CumulativeIntegral out;
  out.h = n > 0 ? t_end / static_cast<double>(n) : h;
  out.grid.resize(n + 1);
  out.f_nodes.resize(n + 1);
  out.f_midpoints.resize(n);
  out.grid[0] = 0.0;
  out.f_nodes[0] = f(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = out.h * static_cast<double>(i);
    const double b = a + out.h;
    out.f_midpoints[i] = f(0.5 * (a + b));
    out.f_nodes[i + 1] = f(b);
    out.grid[i + 1] = out.grid[i] +
        out.h / 6.0 * (out.f_nodes[i] + 4.0 * out.f_midpoints[i] + out.f_nodes[i + 1]);
  }
  return out;
}

}  // namespace temperflow
