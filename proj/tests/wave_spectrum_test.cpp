#include "wavespec/wave_spectrum.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

using namespace wavespec;

namespace {

Eigen::VectorXd unit(Eigen::Index n, Eigen::Index i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(i) = 1.0;
  return v;
}

// A hand-built family on R^4 over five grid times: two "point" atoms that
// inflate into each other's territory at different rates, plus a far atom
// confined to its own coordinate.
struct TinyFamily {
  std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4};
  LatticeFn a, b, far;

  TinyFamily() {
    const Subspace s0 = span({unit(4, 0)});
    const Subspace s01 = span({unit(4, 0), unit(4, 1)});
    const Subspace s1 = span({unit(4, 1)});
    const Subspace s3 = span({unit(4, 3)});
    a = make_lattice_fn(grid, {s0, s0, s01, s01, s01});
    b = make_lattice_fn(grid, {s1, s1, s1, s01, s01});
    far = make_lattice_fn(grid, {s3, s3, s3, s3, s3});
  }
};

}  // namespace

TEST_CASE("ball membership follows the witness-time rule") {
  TinyFamily t;
  const std::vector<LatticeFn> atoms{t.a, t.b, t.far};

  // At radius 0.1, a's value is span{e0}: only a itself fits.
  auto m = ball(t.a, 0.1, atoms, 1e-9);
  REQUIRE(m == std::vector<std::size_t>{0});

  // At radius 0.2 the value grows to span{e0, e1}; b's earliest nonzero
  // value span{e1} fits too, the far atom never does.
  m = ball(t.a, 0.2, atoms, 1e-9);
  REQUIRE(m == std::vector<std::size_t>{0, 1});

  m = ball(t.far, 0.4, atoms, 1e-9);
  REQUIRE(m == std::vector<std::size_t>{2});
}

TEST_CASE("balls grow monotonically with the radius") {
  TinyFamily t;
  const std::vector<LatticeFn> atoms{t.a, t.b, t.far};
  for (const auto& center : atoms) {
    std::size_t prev = 0;
    for (double r : {0.1, 0.2, 0.3, 0.4}) {
      const auto mem = ball(center, r, atoms, 1e-9);
      REQUIRE(mem.size() >= prev);
      prev = mem.size();
    }
  }
}

TEST_CASE("ball rejects radii outside the grid") {
  TinyFamily t;
  const std::vector<LatticeFn> atoms{t.a};
  REQUIRE_THROWS_AS(ball(t.a, 0.0, atoms, 1e-9), std::invalid_argument);
  REQUIRE_THROWS_AS(ball(t.a, -0.3, atoms, 1e-9), std::invalid_argument);
  REQUIRE_THROWS_AS(ball(t.a, 0.7, atoms, 1e-9), std::invalid_argument);
}

TEST_CASE("radii below every activation yield an empty ball") {
  // A family whose members all stay zero through the first two grid times.
  const std::vector<double> grid{0.0, 0.1, 0.2, 0.3};
  const Subspace z = Subspace::zero(3);
  const Subspace s = span({unit(3, 0)});
  const LatticeFn late = make_lattice_fn(grid, {z, z, z, s});
  REQUIRE(ball(late, 0.1, {late}, 1e-9).empty());
  REQUIRE(ball(late, 0.3, {late}, 1e-9) == std::vector<std::size_t>{0});
}

TEST_CASE("metric reconstruction matches the hand-computed distances") {
  TinyFamily t;
  const std::vector<LatticeFn> atoms{t.a, t.b, t.far};
  const Eigen::MatrixXd d = reconstruct_metric(atoms, 1e-9);
  const double inf = std::numeric_limits<double>::infinity();

  // Self distances are one grid step (the first admissible witness).
  REQUIRE(d(0, 0) == Catch::Approx(0.1));
  REQUIRE(d(1, 1) == Catch::Approx(0.1));
  REQUIRE(d(2, 2) == Catch::Approx(0.1));

  // b's first value enters a at the 0.2 snapshot and vice versa at 0.3.
  REQUIRE(d(0, 1) == Catch::Approx(0.2));
  REQUIRE(d(1, 0) == Catch::Approx(0.3));

  // The far atom is disconnected from both.
  REQUIRE(d(0, 2) == inf);
  REQUIRE(d(2, 0) == inf);
  REQUIRE(d(1, 2) == inf);
}

TEST_CASE("ball base axioms hold on the tiny family") {
  TinyFamily t;
  const auto rep = verify_ball_base({t.a, t.b, t.far}, 1e-9);
  REQUIRE(rep.bullet1_checked == 3);
  REQUIRE(rep.bullet1_violations == 0);
  REQUIRE(rep.bullet2_checked > 0);
  REQUIRE(rep.bullet2_violations == 0);
}

TEST_CASE("boundary flags compare against the reachable function with slack") {
  const std::vector<double> grid{0.0, 0.1, 0.2, 0.3};
  const Subspace z = Subspace::zero(3);
  const Subspace s0 = span({unit(3, 0)});
  const Subspace s01 = span({unit(3, 0), unit(3, 1)});
  const Subspace full = Subspace::full(3);
  const LatticeFn u = make_lattice_fn(grid, {z, s0, s01, full});

  // An atom seeded at the first cell: one step of slack absorbs the seed
  // width, the strict rule rejects it at t = 0.
  const LatticeFn near = make_lattice_fn(grid, {s0, s0, s01, s01});
  // An atom seeded away from the reachable flow.
  const LatticeFn deep = make_lattice_fn(grid, {span({unit(3, 2)}), span({unit(3, 2)}),
                                                span({unit(3, 2)}), span({unit(3, 2)})});

  const auto strict = boundary_flags({near, deep}, u, 1e-9, 0);
  REQUIRE_FALSE(strict[0]);
  REQUIRE_FALSE(strict[1]);

  const auto relaxed = boundary_flags({near, deep}, u, 1e-9, 1);
  REQUIRE(relaxed[0]);
  REQUIRE_FALSE(relaxed[1]);
}

TEST_CASE("small interval lattice closes within budget") {
  const OperatorModel m = make_interval_model(6);
  const TimeGrid grid{0.8, 40};
  LatticeBudget budget;
  budget.max_elements = 120;
  budget.max_rounds = 8;
  budget.dedup_tol = 1e-2;
  SpectrumOptions opts;
  opts.reach.rank_tol = 1e-3;

  const LatticeResult lat = generate_lattice(m, grid, budget, opts);
  REQUIRE(lat.complete);
  REQUIRE(lat.elements.size() >= 4);
  REQUIRE(lat.elements.size() <= 120);

  bool has_zero = false, has_full = false;
  for (const auto& e : lat.elements) {
    if (e.is_zero()) has_zero = true;
    if (e.is_full()) has_full = true;
  }
  REQUIRE(has_zero);
  REQUIRE(has_full);

  // Closure property: meet, join and complement of members stay close to
  // the member set.
  auto near_member = [&](const Subspace& s) {
    for (const auto& e : lat.elements)
      if (e.dim() == s.dim() && frobenius_gap(e, s) <= 2.0 * budget.dedup_tol) return true;
    return false;
  };
  for (std::size_t i = 0; i < lat.elements.size(); ++i) {
    REQUIRE(near_member(complement(lat.elements[i])));
    for (std::size_t j = 0; j < i; ++j) {
      REQUIRE(near_member(meet(lat.elements[i], lat.elements[j])));
      REQUIRE(near_member(join(lat.elements[i], lat.elements[j])));
    }
  }
}

TEST_CASE("lattice generation is deterministic") {
  const OperatorModel m = make_interval_model(6);
  const TimeGrid grid{0.8, 40};
  LatticeBudget budget;
  budget.max_elements = 120;
  budget.dedup_tol = 1e-2;
  SpectrumOptions opts;
  opts.reach.rank_tol = 1e-3;

  const LatticeResult r1 = generate_lattice(m, grid, budget, opts);
  const LatticeResult r2 = generate_lattice(m, grid, budget, opts);
  REQUIRE(r1.elements.size() == r2.elements.size());
  for (std::size_t i = 0; i < r1.elements.size(); ++i) {
    REQUIRE(r1.elements[i].dim() == r2.elements[i].dim());
    REQUIRE((r1.elements[i].projector() - r2.elements[i].projector()).cwiseAbs().maxCoeff() ==
            0.0);
  }
}

TEST_CASE("computed spectrum has incomparable atoms and sane metadata") {
  const OperatorModel m = make_interval_model(6);
  const TimeGrid grid{0.8, 40};
  LatticeBudget budget;
  budget.max_elements = 120;
  budget.dedup_tol = 1e-2;
  SpectrumOptions opts;
  opts.reach.rank_tol = 1e-3;

  const SpectrumResult res = compute_spectrum(m, grid, budget, opts);
  REQUIRE(res.complete);
  REQUIRE_FALSE(res.atoms.empty());
  REQUIRE(res.atoms.size() <= res.functions.size());
  REQUIRE(res.functions.size() == res.lattice.elements.size());

  for (std::size_t i = 0; i < res.atoms.size(); ++i)
    for (std::size_t j = 0; j < res.atoms.size(); ++j)
      if (i != j) REQUIRE_FALSE(fn_leq(res.atoms[i], res.atoms[j], opts.leq_tol));

  for (const auto& info : res.atom_info) {
    REQUIRE(info.center >= 0);
    REQUIRE(info.center < 6);
    REQUIRE(info.activation == 0.0);
  }
  REQUIRE(boundary(res).size() == res.atoms.size());

  // The reachable function is monotone and saturates.
  REQUIRE(res.u_fn.values.front().is_zero());
  REQUIRE(res.u_fn.values.back().dim() == 6);

  const auto axioms = verify_ball_base(res.atoms, opts.leq_tol);
  REQUIRE(axioms.bullet1_violations == 0);
  REQUIRE(axioms.bullet2_violations == 0);
}

TEST_CASE("block model lattice contains both blocks") {
  const OperatorModel m = make_block_model(make_interval_model(6), make_interval_model(5));
  const TimeGrid grid{1.0, 40};
  LatticeBudget budget;
  budget.max_elements = 150;
  budget.dedup_tol = 1e-2;
  SpectrumOptions opts;
  opts.reach.rank_tol = 1e-3;

  const LatticeResult lat = generate_lattice(m, grid, budget, opts);

  std::vector<Eigen::VectorXd> b1, b2;
  for (int i = 0; i < 6; ++i) b1.push_back(unit(11, i));
  for (int i = 6; i < 11; ++i) b2.push_back(unit(11, i));
  const Subspace block1 = span(b1);
  const Subspace block2 = span(b2);

  bool saw1 = false, saw2 = false;
  for (const auto& e : lat.elements) {
    if (e.dim() == 6 && subspace_distance(e, block1) < 0.2) saw1 = true;
    if (e.dim() == 5 && subspace_distance(e, block2) < 0.2) saw2 = true;
  }
  REQUIRE(saw1);
  REQUIRE(saw2);
}
