#pragma once

#include "wavespec/dynamics.hpp"
#include "wavespec/lattice_fn.hpp"
#include "wavespec/operator_model.hpp"
#include "wavespec/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace wavespec {

struct LatticeBudget {
  int max_elements = 500;
  int max_rounds = 8;
  double dedup_tol = 1e-3;  // Frobenius projector gap below which elements merge
};

struct SpectrumOptions {
  ReachOptions reach;       // wavefront span tolerance
  double leq_tol = 1e-6;    // containment tolerance for order comparisons
  int boundary_slack = -1;  // grid steps of width compensation; -1 = automatic
};

struct LatticeResult {
  std::vector<Subspace> elements;
  bool complete = false;
  int rounds = 0;
  // Worst rank added when rounding a one-step inflation image up to its least
  // containing element; 0 means the algebra absorbs inflation exactly.
  int inflation_rounded_rank = 0;
};

namespace detail {

// Canonical element order: dimension first, then the projector diagonal,
// then full projector entries. Used both for deterministic admission and for
// budget priority (small elements are admitted first).
struct CanonicalLess {
  bool operator()(const std::pair<Subspace, Eigen::VectorXd>& a,
                  const std::pair<Subspace, Eigen::VectorXd>& b) const {
    if (a.first.dim() != b.first.dim()) return a.first.dim() < b.first.dim();
    const Eigen::VectorXd& da = a.second;
    const Eigen::VectorXd& db = b.second;
    for (Eigen::Index i = 0; i < da.size(); ++i) {
      if (da(i) < db(i)) return true;
      if (da(i) > db(i)) return false;
    }
    const Eigen::MatrixXd pa = a.first.projector();
    const Eigen::MatrixXd pb = b.first.projector();
    for (Eigen::Index j = 0; j < pa.cols(); ++j)
      for (Eigen::Index i = 0; i < pa.rows(); ++i) {
        if (pa(i, j) < pb(i, j)) return true;
        if (pa(i, j) > pb(i, j)) return false;
      }
    return false;
  }
};

class DedupPool {
 public:
  explicit DedupPool(double tol) : tol_(tol) {}

  bool contains(const Subspace& s, const Eigen::VectorXd& diag) const {
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (members_[i].dim() != s.dim()) continue;
      if ((diags_[i] - diag).cwiseAbs().maxCoeff() > 2.0 * tol_) continue;
      if (frobenius_gap(members_[i], s) <= tol_) return true;
    }
    return false;
  }

  void insert(Subspace s, Eigen::VectorXd diag) {
    members_.push_back(std::move(s));
    diags_.push_back(std::move(diag));
  }

  const std::vector<Subspace>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

 private:
  double tol_;
  std::vector<Subspace> members_;
  std::vector<Eigen::VectorXd> diags_;
};

// Estimated grid steps per spatial cell, read off the growth rate of the
// reachable family (rank grows by ~2 per cell covered, one cell per end).
inline int estimate_cell_steps(const LatticeFn& u_fn) {
  const std::size_t n = u_fn.values.size();
  const double total_rank = static_cast<double>(u_fn.values[n - 1].dim());
  if (total_rank < 2.0) return 1;
  std::size_t saturated = n - 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (u_fn.values[i].dim() == u_fn.values[n - 1].dim()) {
      saturated = i;
      break;
    }
  }
  if (saturated == 0) return 1;
  const double steps_per_cell = 2.0 * static_cast<double>(saturated) / total_rank;
  return std::max(1, static_cast<int>(std::lround(steps_per_cell)));
}

// One value per run of constant rank, keeping only runs that persist for at
// least min_dwell grid steps (the final run always counts). Shorter runs are
// threshold-crossing transients of the rank cutoff, not stable states.
inline std::vector<Subspace> stable_plateau_values(const LatticeFn& f, int min_dwell) {
  std::vector<Subspace> out;
  std::size_t i = 0;
  const std::size_t n = f.values.size();
  while (i < n) {
    std::size_t j = i;
    while (j < n && f.values[j].dim() == f.values[i].dim()) ++j;
    if (j == n || j - i >= static_cast<std::size_t>(min_dwell)) out.push_back(f.values[i]);
    i = j;
  }
  return out;
}

}  // namespace detail

// Smallest sublattice containing {0}, the whole space and the stable
// reachable-set snapshots, closed under meet, join and complement, subject to
// the element/round budget. Candidates of every round are admitted in a
// canonical order (dimension first), so reruns and generator shuffles produce
// the identical element list, and small elements survive budget cuts.
//
// Inflation is handled by order rounding rather than by feeding raw inflation
// values back into the worklist. A one-step inflation image of a band-shaped
// element carries the symmetric halves of its border cells long before the
// rank cutoff admits their antisymmetric partners, so the raw image sits
// strictly between two algebra elements; admitting such straddle values
// verbatim makes the closure grow without bound (each admission breeds more
// fractional elements). The underlying continuous dynamics widen a band to a
// band, i.e. the inflation image of an algebra element is again a union of
// bands, which is exactly the least algebra element containing the raw image.
// The closure therefore rounds every inflation image up to that element; the
// audit fields of LatticeResult record how much rounding this took.
inline LatticeResult generate_lattice(const OperatorModel& model, const TimeGrid& grid,
                                      const LatticeBudget& budget,
                                      const SpectrumOptions& opts = {}) {
  if (budget.max_elements < 2) throw std::invalid_argument("generate_lattice: budget too small");
  if (budget.max_rounds < 1) throw std::invalid_argument("generate_lattice: need at least a round");

  detail::DedupPool pool(budget.dedup_tol);
  bool overflow = false;

  auto admit_sorted = [&](std::vector<Subspace>&& candidates) -> std::size_t {
    std::vector<std::pair<Subspace, Eigen::VectorXd>> keyed;
    keyed.reserve(candidates.size());
    for (auto& c : candidates) {
      Eigen::VectorXd d = c.projector_diagonal();
      keyed.emplace_back(std::move(c), std::move(d));
    }
    std::stable_sort(keyed.begin(), keyed.end(), detail::CanonicalLess{});
    std::size_t added = 0;
    for (auto& [s, d] : keyed) {
      if (pool.contains(s, d)) continue;
      if (pool.size() >= static_cast<std::size_t>(budget.max_elements)) {
        overflow = true;
        break;
      }
      pool.insert(std::move(s), std::move(d));
      ++added;
    }
    return added;
  };

  const LatticeFn u = reachable_fn(model, grid, opts.reach);
  const int cell_steps = detail::estimate_cell_steps(u);
  const int min_dwell = std::max(2, cell_steps / 3);

  {
    std::vector<Subspace> seed;
    seed.push_back(Subspace::zero(model.dim));
    seed.push_back(Subspace::full(model.dim));
    for (auto& v : detail::stable_plateau_values(u, min_dwell)) seed.push_back(std::move(v));
    admit_sorted(std::move(seed));
  }

  LatticeResult result;
  std::size_t known = 0;  // elements below this index have been fully combined
  for (int round = 1; round <= budget.max_rounds; ++round) {
    result.rounds = round;
    const std::size_t frontier = pool.size();
    if (known == frontier || overflow) break;

    std::vector<Subspace> candidates;
    for (std::size_t i = known; i < frontier; ++i) {
      const Subspace& a = pool.members()[i];
      candidates.push_back(complement(a));
      for (std::size_t j = 0; j < i; ++j) {
        const Subspace& b = pool.members()[j];
        candidates.push_back(meet(a, b));
        candidates.push_back(join(a, b));
      }
    }
    const std::size_t added = admit_sorted(std::move(candidates));
    known = frontier;
    if (added == 0 && !overflow) {
      result.complete = true;
      break;
    }
  }
  if (overflow) result.complete = false;
  result.elements = pool.members();

  // Inflation audit: round the one-step inflation image of every element up
  // to its least containing element and record the worst rank the rounding
  // had to add. Skipped after overflow (the element list is not an algebra).
  if (result.complete) {
    const double tau = grid.point(std::min(grid.steps, cell_steps));
    const double snap_tol = std::max(opts.leq_tol, 30.0 * opts.reach.rank_tol);
    for (const auto& a : result.elements) {
      if (a.dim() == 0 || a.is_full()) continue;
      const Subspace image = inflate(model, a, tau, grid, opts.reach);
      Eigen::Index best = model.dim;  // the full space always contains it
      for (const auto& e : result.elements) {
        if (e.dim() < image.dim() || e.dim() >= best) continue;
        if (leq_residual(image, e) <= snap_tol) best = e.dim();
      }
      result.inflation_rounded_rank =
          std::max(result.inflation_rounded_rank, static_cast<int>(best - image.dim()));
    }
  }
  return result;
}

// Inflation image of every lattice element. Two distinct deduped elements
// always produce distinct functions (the value at t = 0 is the element), so
// the family has the same size as the lattice.
inline std::vector<LatticeFn> build_function_family(const OperatorModel& model,
                                                    const std::vector<Subspace>& elements,
                                                    const TimeGrid& grid,
                                                    const SpectrumOptions& opts = {}) {
  std::vector<LatticeFn> family;
  family.reserve(elements.size());
  for (const auto& e : elements) family.push_back(inflate_fn(model, e, grid, opts.reach));
  return family;
}

inline std::vector<LatticeFn> spectrum_atoms(const std::vector<LatticeFn>& family, double tol) {
  return family_atoms(family, tol);
}

// Index of the dominant diagonal entry of the atom's earliest nonzero
// projector (first index wins ties).
inline Eigen::Index support_center(const LatticeFn& f) {
  for (const auto& v : f.values) {
    if (v.dim() == 0) continue;
    const Eigen::VectorXd d = v.projector_diagonal();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < d.size(); ++i)
      if (d(i) > d(best)) best = i;
    return best;
  }
  return -1;
}

// Metric ball: atoms b such that b(t) is eventually nonzero and contained in
// a(r). Containment only gets harder as t grows, so the earliest nonzero
// value of b is the decisive one.
inline std::vector<std::size_t> ball(const LatticeFn& a, double r,
                                     const std::vector<LatticeFn>& atoms, double leq_tol) {
  if (a.time_grid.empty()) throw std::invalid_argument("ball: empty function");
  if (!(r > 0.0) || r > a.time_grid.back() * (1.0 + 1e-12))
    throw std::invalid_argument("ball: radius outside the time grid");
  // Value of a at the largest grid point <= r.
  std::size_t ri = 0;
  while (ri + 1 < a.time_grid.size() && a.time_grid[ri + 1] <= r * (1.0 + 1e-12)) ++ri;
  const Subspace& ar = a.values[ri];

  std::vector<std::size_t> members;
  for (std::size_t bi = 0; bi < atoms.size(); ++bi) {
    const LatticeFn& b = atoms[bi];
    detail::check_same_grid(a, b, "ball");
    std::optional<std::size_t> first;
    for (std::size_t i = 1; i < b.values.size(); ++i) {
      if (b.values[i].dim() > 0) {
        first = i;
        break;
      }
    }
    if (!first) continue;
    if (leq_residual(b.values[*first], ar) <= leq_tol) members.push_back(bi);
  }
  return members;
}

struct AtomInfo {
  double activation = -1.0;
  Eigen::Index center = -1;
  bool boundary = false;
  bool boundary_strict = false;
};

struct SpectrumResult {
  LatticeResult lattice;
  std::vector<LatticeFn> functions;
  std::vector<LatticeFn> atoms;
  std::vector<AtomInfo> atom_info;
  LatticeFn u_fn;
  TimeGrid grid;
  bool complete = false;
  int boundary_slack = 0;
};

// Boundary flags. The strict rule a <= u_fn pointwise is vacuous for a family
// generated from nonzero seeds (at t = 0 it compares the seed against {0}),
// so the operational flag compares with a fixed slack: a(t_i) <= u_fn(t_{i+c})
// with c covering the seed's own width. c = 0 reproduces the strict rule.
inline std::vector<bool> boundary_flags(const std::vector<LatticeFn>& atoms, const LatticeFn& u_fn,
                                        double leq_tol, int slack_steps) {
  if (slack_steps < 0) throw std::invalid_argument("boundary_flags: negative slack");
  std::vector<bool> flags;
  flags.reserve(atoms.size());
  const std::size_t n = u_fn.values.size();
  for (const auto& a : atoms) {
    detail::check_same_grid(a, u_fn, "boundary_flags");
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const std::size_t shifted = std::min(n - 1, i + static_cast<std::size_t>(slack_steps));
      if (leq_residual(a.values[i], u_fn.values[shifted]) > leq_tol) ok = false;
    }
    flags.push_back(ok);
  }
  return flags;
}

// Width-compensated boundary flags of a computed spectrum, one per atom.
inline std::vector<bool> boundary(const SpectrumResult& result) {
  std::vector<bool> flags;
  flags.reserve(result.atom_info.size());
  for (const auto& info : result.atom_info) flags.push_back(info.boundary);
  return flags;
}

inline SpectrumResult compute_spectrum(const OperatorModel& model, const TimeGrid& grid,
                                       const LatticeBudget& budget,
                                       const SpectrumOptions& opts = {}) {
  SpectrumResult res;
  res.grid = grid;
  res.u_fn = reachable_fn(model, grid, opts.reach);
  res.lattice = generate_lattice(model, grid, budget, opts);
  res.complete = res.lattice.complete;
  res.functions = build_function_family(model, res.lattice.elements, grid, opts);
  res.atoms = spectrum_atoms(res.functions, opts.leq_tol);

  int slack = opts.boundary_slack;
  if (slack < 0) {
    const int cell_steps = detail::estimate_cell_steps(res.u_fn);
    // Atoms seeded from one-or-two-cell pieces need about 1.5 cells of grace.
    slack = std::max(1, (3 * cell_steps + 1) / 2);
  }
  res.boundary_slack = slack;

  const auto flags = boundary_flags(res.atoms, res.u_fn, opts.leq_tol, slack);
  const auto strict = boundary_flags(res.atoms, res.u_fn, opts.leq_tol, 0);
  res.atom_info.resize(res.atoms.size());
  for (std::size_t i = 0; i < res.atoms.size(); ++i) {
    res.atom_info[i].activation = activation_time(res.atoms[i]);
    res.atom_info[i].center = support_center(res.atoms[i]);
    res.atom_info[i].boundary = flags[i];
    res.atom_info[i].boundary_strict = strict[i];
  }
  return res;
}

// Pairwise distances: d(a, b) = smallest grid radius r with b in B_r[a];
// +infinity when no grid radius works. d(a, a) is the first positive grid
// time (the activation granularity).
inline Eigen::MatrixXd reconstruct_metric(const std::vector<LatticeFn>& atoms, double leq_tol) {
  const std::size_t n = atoms.size();
  Eigen::MatrixXd d(n, n);
  d.setConstant(std::numeric_limits<double>::infinity());
  if (n == 0) return d;
  const auto& grid = atoms[0].time_grid;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const LatticeFn& b = atoms[j];
      std::optional<std::size_t> first;
      for (std::size_t m = 1; m < b.values.size(); ++m) {
        if (b.values[m].dim() > 0) {
          first = m;
          break;
        }
      }
      if (!first) continue;
      const Subspace& probe = b.values[*first];
      // a's values are monotone, so containment is monotone in the radius.
      std::size_t lo = 1, hi = grid.size() - 1;
      if (leq_residual(probe, atoms[i].values[hi]) > leq_tol) continue;
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (leq_residual(probe, atoms[i].values[mid]) <= leq_tol)
          hi = mid;
        else
          lo = mid + 1;
      }
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = grid[lo];
    }
  }
  return d;
}

struct BallAxiomReport {
  long long bullet1_checked = 0;
  long long bullet1_violations = 0;
  long long bullet2_checked = 0;
  long long bullet2_violations = 0;
};

// Base-of-a-topology axioms for the ball system, verified on a decimated
// radius grid: every atom lies in some ball, and whenever an atom lies in two
// balls there is a ball around it inside the intersection (radius min(t1,t2)
// with t_i the containment witnesses).
inline BallAxiomReport verify_ball_base(const std::vector<LatticeFn>& atoms, double leq_tol,
                                        int radius_decimation = 1) {
  BallAxiomReport rep;
  const std::size_t n = atoms.size();
  if (n == 0) return rep;
  const auto& grid = atoms[0].time_grid;
  std::vector<std::size_t> radii;
  for (std::size_t r = 1; r < grid.size(); r += static_cast<std::size_t>(std::max(1, radius_decimation)))
    radii.push_back(r);
  if (radii.empty()) return rep;

  // membership[c][r-index] = bitmask over atoms b with b in B_{grid[r]}[atom c]
  if (n > 63) throw std::invalid_argument("verify_ball_base: too many atoms for the bitmask");
  std::vector<std::vector<unsigned long long>> membership(
      n, std::vector<unsigned long long>(radii.size(), 0ULL));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      const auto mem = ball(atoms[c], grid[radii[ri]], atoms, leq_tol);
      unsigned long long mask = 0;
      for (auto b : mem) mask |= (1ULL << b);
      membership[c][ri] = mask;
    }

  // Bullet 1: every atom lies in at least one ball.
  for (std::size_t a = 0; a < n; ++a) {
    ++rep.bullet1_checked;
    bool covered = false;
    for (std::size_t c = 0; c < n && !covered; ++c)
      for (std::size_t ri = 0; ri < radii.size() && !covered; ++ri)
        if (membership[c][ri] & (1ULL << a)) covered = true;
    if (!covered) ++rep.bullet1_violations;
  }

  // Smallest decimated radius at which atom a is inside B_r[a] (its own
  // witness time); used as the refined radius in bullet 2.
  std::vector<std::optional<std::size_t>> self_radius(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t ri = 0; ri < radii.size(); ++ri)
      if (membership[a][ri] & (1ULL << a)) {
        self_radius[a] = ri;
        break;
      }

  for (std::size_t a = 0; a < n; ++a) {
    if (!self_radius[a]) continue;
    const std::size_t small = *self_radius[a];
    for (std::size_t c1 = 0; c1 < n; ++c1)
      for (std::size_t r1 = 0; r1 < radii.size(); ++r1) {
        if (!(membership[c1][r1] & (1ULL << a))) continue;
        for (std::size_t c2 = 0; c2 < n; ++c2)
          for (std::size_t r2 = 0; r2 < radii.size(); ++r2) {
            if (!(membership[c2][r2] & (1ULL << a))) continue;
            ++rep.bullet2_checked;
            const unsigned long long inner = membership[a][small];
            const unsigned long long inter = membership[c1][r1] & membership[c2][r2];
            if (!(inner & (1ULL << a)) || (inner & ~inter) != 0ULL) ++rep.bullet2_violations;
          }
      }
  }
  return rep;
}

}  // namespace wavespec
