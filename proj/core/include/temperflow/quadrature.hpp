#pragma once

#include <functional>
#include <vector>

namespace temperflow {

using Fn1d = std::function<double(double)>;

// Composite Simpson with a fixed, odd node count (deterministic node set).
double composite_simpson(const Fn1d& f, double a, double b, int nodes);

// Adaptive Simpson with absolute tolerance; used for the time integrals in
// the bound evaluators.
double adaptive_simpson(const Fn1d& f, double a, double b, double tol,
                        int max_depth = 40);

// 16-point Gauss-Legendre on [a, b].
double gauss_legendre_16(const Fn1d& f, double a, double b);

// Cumulative integral of f on the uniform grid {0, h, 2h, ...} covering
// [0, t_end]; one Simpson panel (with midpoint) per grid cell.  Also keeps
// the midpoint samples so callers can run a second Simpson pass against an
// integrand built from the cumulative values.
struct CumulativeIntegral {
  double h = 0.0;
  std::vector<double> grid;        // F(i*h)
  std::vector<double> f_nodes;     // f(i*h)
  std::vector<double> f_midpoints; // f((i+1/2)*h)

  double t_end() const { return h * static_cast<double>(grid.size() - 1); }
  // Linear interpolation of the cumulative values (exact at nodes).
  double at(double t) const;
};

CumulativeIntegral cumulative_integral(const Fn1d& f, double t_end, double h);

}  // namespace temperflow
