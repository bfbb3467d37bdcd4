#pragma once

#include "wavespec/control.hpp"
#include "wavespec/lattice_fn.hpp"
#include "wavespec/operator_model.hpp"
#include "wavespec/subspace.hpp"
#include "wavespec/time_grid.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wavespec {

struct Trajectory {
  TimeGrid grid;
  std::vector<Eigen::VectorXd> states;
};

struct ClassicalTrajectory {
  TimeGrid grid;
  std::vector<Eigen::VectorXd> states;  // states[i] = embed(triples[i])
  std::vector<VishikElement> triples;
};

namespace detail {

// Composite Simpson weights for the prefix [0, i*dt] over grid nodes 0..i.
// Odd prefixes use one 3/8 block at the front; the one-step prefix is handled
// by the caller with off-grid midpoint nodes.
inline std::vector<double> prefix_weights(int i, double dt) {
  std::vector<double> w(static_cast<std::size_t>(i) + 1, 0.0);
  if (i == 0) return w;
  if (i == 1) throw std::logic_error("prefix_weights: single-step prefix handled separately");
  int start = 0;
  if (i % 2 == 1) {
    const double c = 3.0 * dt / 8.0;
    w[0] += c;
    w[1] += 3.0 * c;
    w[2] += 3.0 * c;
    w[3] += c;
    start = 3;
  }
  if (i > start) {
    const double c = dt / 3.0;
    w[static_cast<std::size_t>(start)] += c;
    for (int j = start + 1; j < i; ++j)
      w[static_cast<std::size_t>(j)] += ((j - start) % 2 == 1) ? 4.0 * c : 2.0 * c;
    w[static_cast<std::size_t>(i)] += c;
  }
  return w;
}

struct SpectralTables {
  Eigen::MatrixXd sine;           // column m: sine_prop multipliers at m*dt
  Eigen::MatrixXd one_minus_cos;  // column m: 1 - cos multipliers at m*dt
  Eigen::VectorXd sine_half;      // sine_prop multipliers at dt/2
  Eigen::VectorXd omc_half;
};

inline SpectralTables make_tables(const OperatorModel& model, const TimeGrid& grid) {
  SpectralTables t;
  t.sine.resize(model.dim, grid.steps + 1);
  t.one_minus_cos.resize(model.dim, grid.steps + 1);
  for (int m = 0; m <= grid.steps; ++m) {
    t.sine.col(m) = spectral_multipliers(model, SpectralFn::sine_prop, m * grid.dt());
    t.one_minus_cos.col(m) =
        spectral_multipliers(model, SpectralFn::one_minus_cos, m * grid.dt());
  }
  t.sine_half = spectral_multipliers(model, SpectralFn::sine_prop, 0.5 * grid.dt());
  t.omc_half = spectral_multipliers(model, SpectralFn::one_minus_cos, 0.5 * grid.dt());
  return t;
}

// Convolution-type quadrature in eigencoordinates:
//   result[i] = sum_j w_ij * kernel(t_i - s_j) .* rhs(s_j)
// where kernel columns are tabulated on the same grid.
inline std::vector<Eigen::VectorXd> convolve(const OperatorModel& model, const TimeGrid& grid,
                                             const Eigen::MatrixXd& kernel_table,
                                             const Eigen::VectorXd& kernel_half,
                                             const std::function<Eigen::VectorXd(double)>& rhs_hat) {
  const int n = grid.steps;
  const double dt = grid.dt();
  std::vector<Eigen::VectorXd> rhs(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) rhs[static_cast<std::size_t>(j)] = rhs_hat(grid.point(j));

  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(n) + 1,
                                   Eigen::VectorXd::Zero(model.dim));
  for (int i = 2; i <= n; ++i) {
    const auto w = prefix_weights(i, dt);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.dim);
    for (int j = 0; j <= i; ++j)
      acc.noalias() +=
          w[static_cast<std::size_t>(j)] * kernel_table.col(i - j).cwiseProduct(rhs[static_cast<std::size_t>(j)]);
    out[static_cast<std::size_t>(i)] = acc;
  }
  if (n >= 1) {
    // Simpson on [0, dt] with an off-grid midpoint node.
    const double c = dt / 6.0;
    Eigen::VectorXd acc = c * kernel_table.col(1).cwiseProduct(rhs[0]);
    acc.noalias() += 4.0 * c * kernel_half.cwiseProduct(rhs_hat(0.5 * dt));
    acc.noalias() += c * kernel_table.col(0).cwiseProduct(rhs[1]);
    out[1] = acc;
  }
  return out;
}

}  // namespace detail

// Weak solution of u_tt + L0* u = 0, u(0) = u_t(0) = 0, boundary data h:
//   u(t) = -h(t) + int_0^t sine_prop(t - s) h''(s) ds.
inline Trajectory weak_solution(const OperatorModel& model, const Control& h) {
  if (h.ambient_dim() != model.dim)
    throw std::invalid_argument("weak_solution: control/model dimension mismatch");
  const TimeGrid grid = h.grid();
  if (grid.size() < 5) throw std::invalid_argument("weak_solution: grid too coarse");

  const auto tables = detail::make_tables(model, grid);
  auto rhs_hat = [&](double s) -> Eigen::VectorXd {
    return model.eigenvectors.transpose() * h.deriv2(s);
  };
  auto conv = detail::convolve(model, grid, tables.sine, tables.sine_half, rhs_hat);

  Trajectory traj;
  traj.grid = grid;
  traj.states.resize(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i <= grid.steps; ++i)
    traj.states[static_cast<std::size_t>(i)] =
        model.eigenvectors * conv[static_cast<std::size_t>(i)] - h.value(grid.point(i));
  return traj;
}

// Classical solution for class-M controls, tracked as Vishik triples:
//   w(t)  = int_0^t (I - cos((t-s) L^{1/2})) h'''(s) ds,
//   y0(t) = L^{-1} (I - P_K) w(t),  g(t) = P_K w(t),  h-part = -h(t).
// The represented state is -h(t) + L^{-1} w(t).
inline ClassicalTrajectory classical_solution(const OperatorModel& model, const Control& h) {
  if (h.ambient_dim() != model.dim)
    throw std::invalid_argument("classical_solution: control/model dimension mismatch");
  if (h.tag() != ControlClass::M_class)
    throw std::invalid_argument("classical_solution: control is not in class M");
  const TimeGrid grid = h.grid();
  if (grid.size() < 5) throw std::invalid_argument("classical_solution: grid too coarse");

  const auto tables = detail::make_tables(model, grid);
  auto rhs_hat = [&](double s) -> Eigen::VectorXd {
    return model.eigenvectors.transpose() * h.deriv3(s);
  };
  auto conv = detail::convolve(model, grid, tables.one_minus_cos, tables.omc_half, rhs_hat);

  ClassicalTrajectory traj;
  traj.grid = grid;
  traj.states.resize(static_cast<std::size_t>(grid.size()));
  traj.triples.resize(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i <= grid.steps; ++i) {
    const Eigen::VectorXd w = model.eigenvectors * conv[static_cast<std::size_t>(i)];
    VishikElement y;
    y.g = model.project_K(w);
    y.y0 = apply_function(model, SpectralFn::inverse, w - y.g);
    y.h = -h.value(grid.point(i));
    traj.triples[static_cast<std::size_t>(i)] = y;
    traj.states[static_cast<std::size_t>(i)] =
        y.y0 + apply_function(model, SpectralFn::inverse, y.g) + y.h;
  }
  return traj;
}

struct ResidualReport {
  double wave_residual = 0.0;      // centered second difference vs adjoint action
  double boundary_residual = 0.0;  // boundary data recovered from two routes
  double initial_residual = 0.0;   // Cauchy data at t = 0
};

// Consistency of the two solution routes. The wave residual applies the
// adjoint to the classical triples; the boundary residual recovers h from
// L^{-1} w minus the independently quadratured weak state.
inline ResidualReport residual_check(const OperatorModel& model, const Control& h) {
  const Trajectory weak = weak_solution(model, h);
  const ClassicalTrajectory cls = classical_solution(model, h);
  const TimeGrid grid = h.grid();
  const double dt = grid.dt();

  ResidualReport r;
  for (int i = 1; i < grid.steps; ++i) {
    const Eigen::VectorXd second_diff =
        (cls.states[static_cast<std::size_t>(i) - 1] - 2.0 * cls.states[static_cast<std::size_t>(i)] +
         cls.states[static_cast<std::size_t>(i) + 1]) /
        (dt * dt);
    const Eigen::VectorXd lu = adjoint_action(model, cls.triples[static_cast<std::size_t>(i)]);
    r.wave_residual = std::max(r.wave_residual, (second_diff + lu).norm());
  }
  for (int i = 0; i <= grid.steps; ++i) {
    // L^{-1} w = classical state + h, so the recovered data is
    // (classical state + h) - weak state compared against h itself.
    const Eigen::VectorXd hv = h.value(grid.point(i));
    const Eigen::VectorXd h_rec =
        cls.states[static_cast<std::size_t>(i)] + hv - weak.states[static_cast<std::size_t>(i)];
    r.boundary_residual = std::max(r.boundary_residual, (h_rec - hv).norm());
  }
  r.initial_residual =
      weak.states[0].norm() + ((weak.states[1] - weak.states[0]) / dt).norm();
  return r;
}

// --- Reachable sets and controllability ----------------------------------

struct ReachOptions {
  double rank_tol = 1e-6;  // novelty threshold for wavefront spans
};

namespace detail {

// Columns of the response kernel at time tau, one per K basis vector:
// (-tau I + sine_prop(tau)) k.
inline void add_reach_columns(const OperatorModel& model, GrowingBasis& basis, double tau) {
  const Eigen::VectorXd mult = spectral_multipliers(model, SpectralFn::sine_prop, tau);
  for (Eigen::Index c = 0; c < model.K.dim(); ++c) {
    const Eigen::VectorXd k = model.K.basis().col(c);
    Eigen::VectorXd col = model.eigenvectors * mult.cwiseProduct(model.eigenvectors.transpose() * k);
    col.noalias() -= tau * k;
    basis.add_column(col);
  }
}

inline void add_inflate_columns(const OperatorModel& model, GrowingBasis& basis,
                                const Subspace& a, double tau) {
  const Eigen::VectorXd mult = spectral_multipliers(model, SpectralFn::sine_prop, tau);
  for (Eigen::Index c = 0; c < a.dim(); ++c) {
    const Eigen::VectorXd x = a.basis().col(c);
    basis.add_column(model.eigenvectors * mult.cwiseProduct(model.eigenvectors.transpose() * x));
  }
}

}  // namespace detail

// Reachable subspace at time t: span of the response kernel columns over the
// grid times in (0, t]. Built incrementally, so snapshots are exactly nested.
inline Subspace reachable(const OperatorModel& model, double t, const TimeGrid& grid,
                          const ReachOptions& opts = {}) {
  if (t < 0.0) throw std::invalid_argument("reachable: negative time");
  GrowingBasis basis(model.dim, opts.rank_tol);
  for (int m = 1; m <= grid.steps; ++m) {
    const double tau = grid.point(m);
    if (tau > t * (1.0 + 1e-12)) break;
    detail::add_reach_columns(model, basis, tau);
  }
  return basis.snapshot(opts.rank_tol);
}

// The full monotone family t -> reachable(t) on the grid.
inline LatticeFn reachable_fn(const OperatorModel& model, const TimeGrid& grid,
                              const ReachOptions& opts = {}) {
  GrowingBasis basis(model.dim, opts.rank_tol);
  std::vector<Subspace> values;
  values.reserve(static_cast<std::size_t>(grid.size()));
  values.push_back(basis.snapshot(opts.rank_tol));
  for (int m = 1; m <= grid.steps; ++m) {
    detail::add_reach_columns(model, basis, grid.point(m));
    values.push_back(basis.snapshot(opts.rank_tol));
  }
  return LatticeFn{grid.points(), std::move(values)};
}

// Closure of all reachable sets: the Krylov span of K under L, built with
// re-orthogonalization at every step.
inline Subspace total_reachable(const OperatorModel& model, double rank_tol = kDefaultRankTol) {
  GrowingBasis basis(model.dim, rank_tol);
  for (Eigen::Index c = 0; c < model.K.dim(); ++c) basis.add_column(model.K.basis().col(c));
  Eigen::Index processed = 0;
  for (Eigen::Index depth = 1; depth < model.dim; ++depth) {
    const Eigen::Index upto = basis.dim();
    if (processed == upto || upto == model.dim) break;
    const Subspace snap = basis.snapshot(rank_tol);
    for (Eigen::Index c = processed; c < upto; ++c)
      basis.add_column(model.L * snap.basis().col(c));
    processed = upto;
  }
  return basis.snapshot(rank_tol);
}

// Defect space: orthogonal complement of the total reachable set.
inline Subspace defect_subspace(const OperatorModel& model, double rank_tol = kDefaultRankTol) {
  return complement(total_reachable(model, rank_tol));
}

struct ControllabilityVerdict {
  bool controllable = false;
  Eigen::Index defect_dim = 0;
};

inline ControllabilityVerdict is_controllable(const OperatorModel& model,
                                              double rank_tol = kDefaultRankTol) {
  ControllabilityVerdict v;
  v.defect_dim = defect_subspace(model, rank_tol).dim();
  v.controllable = (v.defect_dim == 0);
  return v;
}

struct CnsaResult {
  bool is_cnsa = false;  // "completely non-self-adjoint": no reducing part in K-perp
  Subspace max_selfadjoint_part = Subspace::zero(1);
  int iterations = 0;
  bool converged = false;
};

// Independent route to the defect: the largest L-invariant subspace of
// K-perp, found as the fixpoint of N -> N  meet  L^{-1} N.
inline CnsaResult cnsa_oracle(const OperatorModel& model, double rank_tol = kDefaultRankTol) {
  CnsaResult res;
  Subspace n = complement(Subspace::span_of(model.K.basis(), rank_tol));
  for (int it = 0; it <= static_cast<int>(model.dim) + 1; ++it) {
    res.iterations = it;
    if (n.dim() == 0) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd img(model.dim, n.dim());
    for (Eigen::Index c = 0; c < n.dim(); ++c)
      img.col(c) = apply_function(model, SpectralFn::inverse, n.basis().col(c));
    const Subspace next = meet(n, Subspace::span_of(img, rank_tol));
    if (next.dim() == n.dim() && subspace_distance(next, n) < 100.0 * rank_tol) {
      n = next;
      res.converged = true;
      break;
    }
    n = next;
  }
  res.max_selfadjoint_part = n;
  res.is_cnsa = (n.dim() == 0);
  return res;
}

// Auxiliary propagated vector w^y(t) = sine_prop(t) y.
inline Eigen::VectorXd w_solution(const OperatorModel& model, const Eigen::VectorXd& y, double t) {
  if (t < 0.0) throw std::invalid_argument("w_solution: negative time");
  return apply_function(model, SpectralFn::sine_prop, y, t);
}

struct MembershipReport {
  bool is_member = false;
  double max_violation = 0.0;
};

// Membership test for the defect space: y is unreachable iff
// -t y + w^y(t) stays orthogonal to K for all t.
inline MembershipReport defect_membership(const OperatorModel& model, const Eigen::VectorXd& y,
                                          const TimeGrid& grid, double tol = 1e-8) {
  if (y.size() != model.dim) throw std::invalid_argument("defect_membership: dimension mismatch");
  MembershipReport r;
  const double scale = std::max(1.0, y.norm());
  for (int i = 0; i <= grid.steps; ++i) {
    const double t = grid.point(i);
    const Eigen::VectorXd probe = -t * y + w_solution(model, y, t);
    r.max_violation = std::max(r.max_violation, model.project_K(probe).norm() / scale);
  }
  r.is_member = r.max_violation < tol;
  return r;
}

// Wave inflation: I^t A = span of sine_prop(tau) A over grid times in (0, t],
// together with A itself (the tau -> 0 limit directions, which a finite grid
// would otherwise lose; the identity and monotonicity axioms need them).
// inflate(A, 0) returns A and the zero subspace is a fixed point.
inline Subspace inflate(const OperatorModel& model, const Subspace& a, double t,
                        const TimeGrid& grid, const ReachOptions& opts = {}) {
  if (t < 0.0) throw std::invalid_argument("inflate: negative time");
  if (a.ambient_dim() != model.dim) throw std::invalid_argument("inflate: dimension mismatch");
  if (t == 0.0 || a.dim() == 0) return a;
  GrowingBasis basis(model.dim, opts.rank_tol);
  for (Eigen::Index c = 0; c < a.dim(); ++c) basis.add_column(a.basis().col(c));
  for (int m = 1; m <= grid.steps; ++m) {
    const double tau = grid.point(m);
    if (tau > t * (1.0 + 1e-12)) break;
    detail::add_inflate_columns(model, basis, a, tau);
  }
  return basis.snapshot(a.rank_tol());
}

// Whole inflation sweep as a monotone function; value at 0 is A itself.
inline LatticeFn inflate_fn(const OperatorModel& model, const Subspace& a, const TimeGrid& grid,
                            const ReachOptions& opts = {}) {
  if (a.ambient_dim() != model.dim) throw std::invalid_argument("inflate_fn: dimension mismatch");
  std::vector<Subspace> values;
  values.reserve(static_cast<std::size_t>(grid.size()));
  values.push_back(a);
  if (a.dim() == 0) {
    for (int m = 1; m <= grid.steps; ++m) values.push_back(a);
    return LatticeFn{grid.points(), std::move(values)};
  }
  GrowingBasis basis(model.dim, opts.rank_tol);
  for (Eigen::Index c = 0; c < a.dim(); ++c) basis.add_column(a.basis().col(c));
  for (int m = 1; m <= grid.steps; ++m) {
    detail::add_inflate_columns(model, basis, a, grid.point(m));
    values.push_back(basis.snapshot(a.rank_tol()));
  }
  return LatticeFn{grid.points(), std::move(values)};
}

}  // namespace wavespec
