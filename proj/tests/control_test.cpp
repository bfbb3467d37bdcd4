#include "wavespec/control.hpp"
#include "wavespec/operator_model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace wavespec;

namespace {
const TimeGrid kGrid{1.0, 40};
}

TEST_CASE("monomial coefficients expose the full derivative chain") {
  const ScalarCoeff c = monomial_coeff(2.0, 3);  // 2 t^3
  REQUIRE(c.f(1.5) == Catch::Approx(2.0 * 1.5 * 1.5 * 1.5));
  REQUIRE(c.d1(1.5) == Catch::Approx(6.0 * 1.5 * 1.5));
  REQUIRE(c.d2(1.5) == Catch::Approx(12.0 * 1.5));
  REQUIRE(c.d3(1.5) == Catch::Approx(12.0));
  REQUIRE(c.f(0.0) == 0.0);
  REQUIRE(c.d1(0.0) == 0.0);
}

TEST_CASE("coefficient sums differentiate termwise") {
  const ScalarCoeff s = sum_coeff(monomial_coeff(1.0, 3), monomial_coeff(-0.5, 4));
  REQUIRE(s.f(2.0) == Catch::Approx(8.0 - 8.0));
  REQUIRE(s.d3(2.0) == Catch::Approx(6.0 - 24.0));
}

TEST_CASE("controls accept admissible coefficient families") {
  const OperatorModel m = make_interval_model(8);
  const Control h = Control::make(
      m, {monomial_coeff(1.0, 3), monomial_coeff(0.0, 0)}, kGrid, ControlClass::M_class);
  REQUIRE(h.ambient_dim() == 8);
  const Eigen::VectorXd v = h.value(0.5);
  REQUIRE((v - 0.125 * m.K.basis().col(0)).norm() < 1e-14);
  REQUIRE((h.deriv3(0.5) - 6.0 * m.K.basis().col(0)).norm() < 1e-14);
}

TEST_CASE("controls reject data violating the rest condition") {
  const OperatorModel m = make_interval_model(8);
  // t^1 has a nonzero first derivative at 0.
  REQUIRE_THROWS_AS(Control::make(m, {monomial_coeff(1.0, 1), monomial_coeff(0.0, 0)}, kGrid,
                                  ControlClass::C2_admissible),
                    std::invalid_argument);
  // t^2 is fine for the weak class but not for class M (h''(0) = 2).
  REQUIRE_NOTHROW(Control::make(m, {monomial_coeff(1.0, 2), monomial_coeff(0.0, 0)}, kGrid,
                                ControlClass::C2_admissible));
  REQUIRE_THROWS_AS(Control::make(m, {monomial_coeff(1.0, 2), monomial_coeff(0.0, 0)}, kGrid,
                                  ControlClass::M_class),
                    std::invalid_argument);
}

TEST_CASE("controls reject inconsistent derivative evaluators") {
  const OperatorModel m = make_interval_model(8);
  ScalarCoeff wrong = monomial_coeff(1.0, 3);
  wrong.d2 = [](double t) { return -6.0 * t; };  // sign flip breaks the chain
  REQUIRE_THROWS_AS(
      Control::make(m, {wrong, monomial_coeff(0.0, 0)}, kGrid, ControlClass::M_class),
      std::invalid_argument);

  ScalarCoeff missing = monomial_coeff(1.0, 3);
  missing.d3 = nullptr;
  REQUIRE_THROWS_AS(
      Control::make(m, {missing, monomial_coeff(0.0, 0)}, kGrid, ControlClass::M_class),
      std::invalid_argument);
}

TEST_CASE("controls reject coefficient count mismatches") {
  const OperatorModel m = make_interval_model(8);  // K has dimension 2
  REQUIRE_THROWS_AS(Control::make(m, {monomial_coeff(1.0, 3)}, kGrid, ControlClass::M_class),
                    std::invalid_argument);
}

TEST_CASE("smooth transcendental controls pass the chain check") {
  // h(t) = 1 - cos(t) vanishes with its first derivative at 0.
  ScalarCoeff c;
  c.f = [](double t) { return 1.0 - std::cos(t); };
  c.d1 = [](double t) { return std::sin(t); };
  c.d2 = [](double t) { return std::cos(t); };
  c.d3 = [](double t) { return -std::sin(t); };
  const OperatorModel m = make_interval_model(8);
  REQUIRE_NOTHROW(
      Control::make(m, {c, monomial_coeff(0.0, 0)}, kGrid, ControlClass::C2_admissible));
}
