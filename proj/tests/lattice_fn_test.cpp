#include "wavespec/lattice_fn.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <vector>

using namespace wavespec;

namespace {

Eigen::VectorXd unit(Eigen::Index n, Eigen::Index i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(i) = 1.0;
  return v;
}

LatticeFn constant_fn(const std::vector<double>& grid, const Subspace& s) {
  return make_lattice_fn(grid, std::vector<Subspace>(grid.size(), s));
}

}  // namespace

TEST_CASE("lattice function construction validates its grid") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const Subspace z = Subspace::zero(3);
  REQUIRE_NOTHROW(make_lattice_fn(grid, {z, z, z}));
  REQUIRE_THROWS_AS(make_lattice_fn({0.5, 1.0}, {z, z}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_lattice_fn({0.0, 1.0, 1.0}, {z, z, z}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_lattice_fn(grid, {z, z}), std::invalid_argument);
}

TEST_CASE("lattice function construction rejects non-monotone values") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const Subspace small = span({unit(3, 0)});
  const Subspace big = span({unit(3, 0), unit(3, 1)});
  REQUIRE_NOTHROW(make_lattice_fn(grid, {Subspace::zero(3), small, big}));
  REQUIRE_THROWS_AS(make_lattice_fn(grid, {big, small, small}), std::invalid_argument);
  // Equal dimension but different direction is also a monotonicity break.
  const Subspace other = span({unit(3, 2)});
  REQUIRE_THROWS_AS(make_lattice_fn(grid, {small, other, big}), std::invalid_argument);
}

TEST_CASE("pointwise order of lattice functions") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const Subspace small = span({unit(3, 0)});
  const Subspace big = span({unit(3, 0), unit(3, 1)});
  const LatticeFn f = constant_fn(grid, small);
  const LatticeFn g = constant_fn(grid, big);
  REQUIRE(fn_leq(f, g, 1e-10));
  REQUIRE_FALSE(fn_leq(g, f, 1e-10));
  REQUIRE(fn_leq(f, f, 1e-10));
  REQUIRE(fn_equal(f, f, 1e-10));
  REQUIRE_FALSE(fn_equal(f, g, 1e-10));
}

TEST_CASE("zero function detection and activation times") {
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75};
  const Subspace z = Subspace::zero(2);
  const Subspace line = span({unit(2, 0)});
  REQUIRE(is_zero_fn(constant_fn(grid, z)));
  REQUIRE_FALSE(is_zero_fn(constant_fn(grid, line)));
  const LatticeFn late = make_lattice_fn(grid, {z, z, line, line});
  REQUIRE(activation_time(late) == Catch::Approx(0.5));
  REQUIRE(activation_time(constant_fn(grid, z)) == -1.0);
  REQUIRE(activation_time(constant_fn(grid, line)) == 0.0);
}

TEST_CASE("atoms of a function family are the minimal nonzero members") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const Subspace a = span({unit(3, 0)});
  const Subspace b = span({unit(3, 1)});
  const Subspace ab = span({unit(3, 0), unit(3, 1)});
  const LatticeFn fa = constant_fn(grid, a);
  const LatticeFn fb = constant_fn(grid, b);
  const LatticeFn fab = constant_fn(grid, ab);
  const LatticeFn fz = constant_fn(grid, Subspace::zero(3));

  const auto atoms = family_atoms({fab, fa, fz, fb, fa}, 1e-10);
  REQUIRE(atoms.size() == 2);
  // Each atom equals fa or fb; the composite and the zero function are gone.
  for (const auto& atom : atoms) {
    REQUIRE((fn_equal(atom, fa, 1e-10) || fn_equal(atom, fb, 1e-10)));
    REQUIRE_FALSE(fn_equal(atom, fab, 1e-10));
  }
  REQUIRE_FALSE(fn_equal(atoms[0], atoms[1], 1e-10));
}

TEST_CASE("atoms are pairwise incomparable") {
  const std::vector<double> grid{0.0, 1.0};
  const Subspace a = span({unit(4, 0)});
  const Subspace b = span({unit(4, 1)});
  const Subspace c = span({unit(4, 2), unit(4, 3)});
  const auto atoms = family_atoms(
      {constant_fn(grid, a), constant_fn(grid, b), constant_fn(grid, c),
       constant_fn(grid, join(a, b))},
      1e-10);
  REQUIRE(atoms.size() == 3);
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = 0; j < atoms.size(); ++j)
      if (i != j) REQUIRE_FALSE(fn_leq(atoms[i], atoms[j], 1e-10));
}

TEST_CASE("an empty or all-zero family has no atoms") {
  REQUIRE(family_atoms({}, 1e-10).empty());
  const std::vector<double> grid{0.0, 1.0};
  REQUIRE(family_atoms({constant_fn(grid, Subspace::zero(2))}, 1e-10).empty());
}
