#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wavespec::continuum {

// Composite Simpson on [a, b] with n (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

struct SmoothFunction1D {
  std::function<double(double)> f0;  // value
  std::function<double(double)> f1;  // first derivative
  std::function<double(double)> f2;  // second derivative
  int grid_points = 401;             // quadrature grid size (odd)
};

struct BoundaryPair {
  double at0 = 0.0;
  double at1 = 0.0;
};

inline SmoothFunction1D make_smooth(std::function<double(double)> f0,
                                    std::function<double(double)> f1,
                                    std::function<double(double)> f2, int grid_points = 401) {
  if (!f0 || !f1 || !f2) throw std::invalid_argument("make_smooth: missing evaluator");
  if (grid_points < 5 || grid_points % 2 == 0)
    throw std::invalid_argument("make_smooth: grid_points must be odd and >= 5");
  const double delta = 1e-4;
  for (double x : {0.15, 0.35, 0.55, 0.75, 0.95}) {
    const double fd1 = (f0(x + delta) - f0(x - delta)) / (2.0 * delta);
    const double fd2 = (f0(x + delta) - 2.0 * f0(x) + f0(x - delta)) / (delta * delta);
    if (std::abs(fd1 - f1(x)) > 1e-5 * (1.0 + std::abs(f1(x))))
      throw std::invalid_argument("make_smooth: first derivative inconsistent");
    if (std::abs(fd2 - f2(x)) > 1e-3 * (1.0 + std::abs(f2(x))))
      throw std::invalid_argument("make_smooth: second derivative inconsistent");
  }
  SmoothFunction1D s;
  s.f0 = std::move(f0);
  s.f1 = std::move(f1);
  s.f2 = std::move(f2);
  s.grid_points = grid_points;
  return s;
}

inline double inner(const SmoothFunction1D& f, const SmoothFunction1D& g) {
  const int m = std::max(f.grid_points, g.grid_points);
  return simpson([&](double x) { return f.f0(x) * g.f0(x); }, 0.0, 1.0, m - 1);
}

inline BoundaryPair trace(const SmoothFunction1D& y) { return {y.f0(0.0), y.f0(1.0)}; }

// Outward normal: d/dnu at 0 is -d/dx, at 1 is +d/dx.
inline BoundaryPair normal_derivative(const SmoothFunction1D& y) {
  return {-y.f1(0.0), y.f1(1.0)};
}

inline double boundary_inner(const BoundaryPair& f, const BoundaryPair& g) {
  return f.at0 * g.at0 + f.at1 * g.at1;
}

// u(x) = integral of min(x,s)(1 - max(x,s)) y(s) ds: the Dirichlet solution
// of -u'' = y, u(0) = u(1) = 0. The integrand has a kink at s = x, so each
// evaluation integrates the two smooth pieces separately; the derivative
// formula comes from differentiating under the integral sign.
inline SmoothFunction1D green_apply(const SmoothFunction1D& y) {
  const auto ysrc = y.f0;
  const int m = y.grid_points;
  const int half = m - 1;  // even subinterval count for each smooth piece

  auto value = [ysrc, half](double x) {
    const double left = simpson([&](double s) { return s * ysrc(s); }, 0.0, x, half);
    const double right = simpson([&](double s) { return (1.0 - s) * ysrc(s); }, x, 1.0, half);
    return (1.0 - x) * left + x * right;
  };
  auto deriv = [ysrc, half](double x) {
    const double left = simpson([&](double s) { return s * ysrc(s); }, 0.0, x, half);
    const double right = simpson([&](double s) { return (1.0 - s) * ysrc(s); }, x, 1.0, half);
    return -left + right;
  };
  auto second = [ysrc](double x) { return -ysrc(x); };

  SmoothFunction1D u;
  u.f0 = value;
  u.f1 = deriv;
  u.f2 = second;
  u.grid_points = m;
  return u;
}

// Harmonic (= linear) continuation of boundary data.
inline SmoothFunction1D harmonic_continuation(const BoundaryPair& f, int grid_points = 401) {
  const double a = f.at0;
  const double b = f.at1 - f.at0;
  SmoothFunction1D s;
  s.f0 = [a, b](double x) { return a + b * x; };
  s.f1 = [b](double) { return b; };
  s.f2 = [](double) { return 0.0; };
  s.grid_points = grid_points;
  return s;
}

// Dirichlet-to-Neumann map of the interval: normal derivative of the
// harmonic continuation.
inline BoundaryPair dtn(const BoundaryPair& f) {
  return {f.at0 - f.at1, f.at1 - f.at0};
}

// Normal derivative of the Dirichlet solution, in closed form:
// (-(L^-1 y)'(0), (L^-1 y)'(1)) = (-int (1-s) y, -int s y).
inline BoundaryPair normal_derivative_of_inverse(const SmoothFunction1D& y) {
  const int n = y.grid_points - 1;
  const double d0 = -simpson([&](double s) { return (1.0 - s) * y.f0(s); }, 0.0, 1.0, n);
  const double d1 = -simpson([&](double s) { return s * y.f0(s); }, 0.0, 1.0, n);
  return {d0, d1};
}

// Canonical boundary operators: first = trace, second = normal derivative
// minus the Dirichlet-to-Neumann part (which kills harmonic functions).
inline BoundaryPair gamma1(const SmoothFunction1D& y) { return trace(y); }

inline BoundaryPair gamma2(const SmoothFunction1D& y) {
  const BoundaryPair t = trace(y);
  const BoundaryPair nd = normal_derivative(y);
  const BoundaryPair lt = dtn(t);
  return {nd.at0 - lt.at0, nd.at1 - lt.at1};
}

struct ContinuumComponents {
  SmoothFunction1D y0;  // vanishes at both ends, in the operator's domain
  SmoothFunction1D g;   // linear
  SmoothFunction1D h;   // linear (harmonic part)
};

// Splits y into y0 + L^-1 g + h: h continues the trace, g is the unique
// linear function whose image under normal_derivative_of_inverse matches the
// residual boundary data, y0 is the remainder. On linear g = a + bx the map
// normal_derivative_of_inverse acts as -[[1/2, 1/6], [1/2, 1/3]] (a, b).
inline ContinuumComponents vishik_components(const SmoothFunction1D& y) {
  const BoundaryPair tr = trace(y);
  const BoundaryPair g2 = gamma2(y);  // residual data after removing the harmonic response

  // Solve -[[1/2, 1/6], [1/2, 1/3]] (a, b) = g2; the matrix inverse is
  // -12 [[1/3, -1/6], [-1/2, 1/2]].
  const double a = -12.0 * ((1.0 / 3.0) * g2.at0 - (1.0 / 6.0) * g2.at1);
  const double b = -12.0 * (-(1.0 / 2.0) * g2.at0 + (1.0 / 2.0) * g2.at1);

  ContinuumComponents out;
  out.h = harmonic_continuation(tr, y.grid_points);
  out.g = SmoothFunction1D{[a, b](double x) { return a + b * x; },
                           [b](double) { return b; },
                           [](double) { return 0.0; },
                           y.grid_points};
  const SmoothFunction1D lg = green_apply(out.g);
  const auto yf0 = y.f0, yf1 = y.f1, yf2 = y.f2;
  const auto lg0 = lg.f0, lg1 = lg.f1;
  const auto h0 = out.h.f0, h1 = out.h.f1;
  out.y0 = SmoothFunction1D{
      [yf0, lg0, h0](double x) { return yf0(x) - lg0(x) - h0(x); },
      [yf1, lg1, h1](double x) { return yf1(x) - lg1(x) - h1(x); },
      [yf2, a, b](double x) { return yf2(x) + a + b * x; },  // (L^-1 g)'' = -g, h'' = 0
      y.grid_points};
  return out;
}

struct GreenFormulaReport {
  double lhs = 0.0;  // (-u'', v) - (u, -v'')
  double rhs = 0.0;  // boundary pairing of the canonical data
  double defect = 0.0;
};

inline GreenFormulaReport green_formula_report(const SmoothFunction1D& u,
                                               const SmoothFunction1D& v) {
  const int m = std::max(u.grid_points, v.grid_points);
  const int n = m - 1;
  const double t1 = simpson([&](double x) { return -u.f2(x) * v.f0(x); }, 0.0, 1.0, n);
  const double t2 = simpson([&](double x) { return u.f0(x) * -v.f2(x); }, 0.0, 1.0, n);
  GreenFormulaReport rep;
  rep.lhs = t1 - t2;
  rep.rhs = boundary_inner(gamma1(u), gamma2(v)) - boundary_inner(gamma2(u), gamma1(v));
  rep.defect = std::abs(rep.lhs - rep.rhs);
  return rep;
}

inline double green_formula_check(const SmoothFunction1D& u, const SmoothFunction1D& v) {
  return green_formula_report(u, v).defect;
}

struct NamedFunction {
  std::string name;
  SmoothFunction1D fn;
};

// Test function library. The polynomial entries have closed-form pairings;
// the transcendental ones exercise genuine quadrature error (polynomials of
// degree <= 3 are integrated exactly by Simpson).
inline std::vector<NamedFunction> function_library(int grid_points = 401) {
  std::vector<NamedFunction> lib;
  auto add = [&](std::string name, std::function<double(double)> f0,
                 std::function<double(double)> f1, std::function<double(double)> f2) {
    lib.push_back({std::move(name), make_smooth(std::move(f0), std::move(f1), std::move(f2),
                                                grid_points)});
  };
  const double pi = 3.14159265358979323846;
  add("x^2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; },
      [](double) { return 2.0; });
  add("x^3", [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; },
      [](double x) { return 6.0 * x; });
  add("3-x", [](double x) { return 3.0 - x; }, [](double) { return -1.0; },
      [](double) { return 0.0; });
  add("x(1-x)/2", [](double x) { return 0.5 * x * (1.0 - x); },
      [](double x) { return 0.5 - x; }, [](double) { return -1.0; });
  add("sin(pi x)", [pi](double x) { return std::sin(pi * x); },
      [pi](double x) { return pi * std::cos(pi * x); },
      [pi](double x) { return -pi * pi * std::sin(pi * x); });
  add("exp(x)", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
      [](double x) { return std::exp(x); });
  add("cos(2x)+x", [](double x) { return std::cos(2.0 * x) + x; },
      [](double x) { return -2.0 * std::sin(2.0 * x) + 1.0; },
      [](double x) { return -4.0 * std::cos(2.0 * x); });
  return lib;
}

}  // namespace wavespec::continuum
