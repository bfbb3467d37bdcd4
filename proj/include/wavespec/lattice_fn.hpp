#pragma once

#include "wavespec/subspace.hpp"

#include <stdexcept>
#include <vector>

namespace wavespec {

// A monotone subspace-valued function sampled on a time grid:
// values[i] is the subspace at time_grid[i], and values may only grow with i.
struct LatticeFn {
  std::vector<double> time_grid;
  std::vector<Subspace> values;

  const Subspace& value_at_index(std::size_t i) const { return values.at(i); }
};

inline LatticeFn make_lattice_fn(std::vector<double> grid, std::vector<Subspace> values,
                                 double mono_tol = 1e-6) {
  if (grid.size() != values.size() || grid.empty())
    throw std::invalid_argument("make_lattice_fn: grid/value size mismatch");
  if (grid.front() != 0.0)
    throw std::invalid_argument("make_lattice_fn: grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("make_lattice_fn: grid must be strictly increasing");
    if (values[i].ambient_dim() != values[0].ambient_dim())
      throw std::invalid_argument("make_lattice_fn: mixed ambient dimensions");
    if (leq_residual(values[i - 1], values[i]) > mono_tol)
      throw std::invalid_argument("make_lattice_fn: values are not monotone");
  }
  return LatticeFn{std::move(grid), std::move(values)};
}

namespace detail {

inline void check_same_grid(const LatticeFn& f, const LatticeFn& g, const char* who) {
  if (f.time_grid != g.time_grid)
    throw std::invalid_argument(std::string(who) + ": time grids differ");
}

}  // namespace detail

inline bool is_zero_fn(const LatticeFn& f) {
  for (const auto& v : f.values)
    if (v.dim() > 0) return false;
  return true;
}

// Pointwise containment over the whole grid; stops at the first violation.
inline bool fn_leq(const LatticeFn& f, const LatticeFn& g, double tol) {
  detail::check_same_grid(f, g, "fn_leq");
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (leq_residual(f.values[i], g.values[i]) > tol) return false;
  return true;
}

inline bool fn_equal(const LatticeFn& f, const LatticeFn& g, double tol) {
  detail::check_same_grid(f, g, "fn_equal");
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i].dim() != g.values[i].dim()) return false;
    if (subspace_distance(f.values[i], g.values[i]) > tol) return false;
  }
  return true;
}

// First grid time at which the function is nonzero; negative when it never is.
inline double activation_time(const LatticeFn& f) {
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.values[i].dim() > 0) return f.time_grid[i];
  return -1.0;
}

// Minimal nonzero members of the family under the pointwise order.
// Duplicates (pointwise distance below tol) are collapsed to their first
// representative before minimality is decided.
inline std::vector<LatticeFn> family_atoms(const std::vector<LatticeFn>& family, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("family_atoms: tolerance must be positive");
  std::vector<const LatticeFn*> reps;
  for (const auto& f : family) {
    bool dup = false;
    for (const auto* r : reps) {
      if (fn_equal(f, *r, tol)) {
        dup = true;
        break;
      }
    }
    if (!dup) reps.push_back(&f);
  }

  std::vector<LatticeFn> atoms;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (is_zero_fn(*reps[i])) continue;
    bool minimal = true;
    for (std::size_t j = 0; j < reps.size() && minimal; ++j) {
      if (j == i || is_zero_fn(*reps[j])) continue;
      // Cheap necessary condition first: containment at t = 0.
      if (reps[j]->values[0].dim() > reps[i]->values[0].dim()) continue;
      if (fn_leq(*reps[j], *reps[i], tol)) minimal = false;
    }
    if (minimal) atoms.push_back(*reps[i]);
  }
  return atoms;
}

}  // namespace wavespec
