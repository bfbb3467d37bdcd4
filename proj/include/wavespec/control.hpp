#pragma once

#include "wavespec/operator_model.hpp"
#include "wavespec/time_grid.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace wavespec {

// Scalar coefficient with evaluators for the value and first three
// derivatives; the smoothness the solver relies on is checked at build time
// by finite-difference probes.
struct ScalarCoeff {
  std::function<double(double)> f, d1, d2, d3;
};

inline ScalarCoeff monomial_coeff(double a, int power) {
  if (power < 0) throw std::invalid_argument("monomial_coeff: negative power");
  auto term = [a, power](double t, int order) {
    if (order > power) return 0.0;
    double c = a;
    for (int j = 0; j < order; ++j) c *= static_cast<double>(power - j);
    return c * std::pow(t, power - order);
  };
  return ScalarCoeff{[term](double t) { return term(t, 0); },
                     [term](double t) { return term(t, 1); },
                     [term](double t) { return term(t, 2); },
                     [term](double t) { return term(t, 3); }};
}

inline ScalarCoeff sum_coeff(const ScalarCoeff& a, const ScalarCoeff& b) {
  return ScalarCoeff{[a, b](double t) { return a.f(t) + b.f(t); },
                     [a, b](double t) { return a.d1(t) + b.d1(t); },
                     [a, b](double t) { return a.d2(t) + b.d2(t); },
                     [a, b](double t) { return a.d3(t) + b.d3(t); }};
}

// C2_admissible: h(0) = h'(0) = 0, enough for the weak solution formula.
// M_class additionally requires h''(0) = 0 and a usable third derivative,
// enough for the classical solution formula.
enum class ControlClass { C2_admissible, M_class };

// Boundary control h(t) = sum_c coeffs[c](t) * k_basis.col(c), a K-valued
// curve on a time grid.
class Control {
 public:
  static Control make(Eigen::MatrixXd k_basis, std::vector<ScalarCoeff> coeffs, TimeGrid grid,
                      ControlClass tag) {
    grid.validate();
    if (k_basis.cols() == 0 || static_cast<std::size_t>(k_basis.cols()) != coeffs.size())
      throw std::invalid_argument("Control: coefficient count must match basis columns");
    for (const auto& c : coeffs)
      if (!c.f || !c.d1 || !c.d2 || !c.d3)
        throw std::invalid_argument("Control: all four evaluators are required");

    for (const auto& c : coeffs) {
      if (std::abs(c.f(0.0)) > 1e-12 || std::abs(c.d1(0.0)) > 1e-12)
        throw std::invalid_argument("Control: h(0) and h'(0) must vanish");
      if (tag == ControlClass::M_class && std::abs(c.d2(0.0)) > 1e-12)
        throw std::invalid_argument("Control: class M requires h''(0) = 0");
      check_derivative_chain(c, grid);
    }
    return Control(std::move(k_basis), std::move(coeffs), grid, tag);
  }

  static Control make(const OperatorModel& model, std::vector<ScalarCoeff> coeffs, TimeGrid grid,
                      ControlClass tag) {
    return make(model.K.basis(), std::move(coeffs), grid, tag);
  }

  const Eigen::MatrixXd& k_basis() const { return basis_; }
  const std::vector<ScalarCoeff>& coeffs() const { return coeffs_; }
  const TimeGrid& grid() const { return grid_; }
  ControlClass tag() const { return tag_; }
  Eigen::Index ambient_dim() const { return basis_.rows(); }

  Eigen::VectorXd value(double t) const { return combine(t, 0); }
  Eigen::VectorXd deriv1(double t) const { return combine(t, 1); }
  Eigen::VectorXd deriv2(double t) const { return combine(t, 2); }
  Eigen::VectorXd deriv3(double t) const { return combine(t, 3); }

 private:
  Control(Eigen::MatrixXd b, std::vector<ScalarCoeff> c, TimeGrid g, ControlClass tag)
      : basis_(std::move(b)), coeffs_(std::move(c)), grid_(g), tag_(tag) {}

  Eigen::VectorXd combine(double t, int order) const {
    Eigen::VectorXd weights(basis_.cols());
    for (Eigen::Index c = 0; c < basis_.cols(); ++c) {
      const ScalarCoeff& sc = coeffs_[static_cast<std::size_t>(c)];
      switch (order) {
        case 0: weights(c) = sc.f(t); break;
        case 1: weights(c) = sc.d1(t); break;
        case 2: weights(c) = sc.d2(t); break;
        default: weights(c) = sc.d3(t); break;
      }
    }
    return basis_ * weights;
  }

  static void check_derivative_chain(const ScalarCoeff& c, const TimeGrid& grid) {
    const double delta = std::min(grid.dt(), 1e-3);
    auto probe = [&](const std::function<double(double)>& val,
                     const std::function<double(double)>& der,
                     const std::function<double(double)>& curv, double t) {
      const double fd = (val(t + delta) - val(t - delta)) / (2.0 * delta);
      const double scale =
          1.0 + std::abs(der(t)) + std::abs(curv(t + delta)) + std::abs(curv(t - delta));
      if (std::abs(fd - der(t)) > 25.0 * delta * delta * scale + 1e-9 * scale)
        throw std::invalid_argument("Control: derivative evaluators are inconsistent");
    };
    for (int i = 1; i <= 5; ++i) {
      const double t = grid.t_max * static_cast<double>(i) / 6.0;
      probe(c.f, c.d1, c.d2, t);
      probe(c.d1, c.d2, c.d3, t);
      probe(c.d2, c.d3, c.d3, t);
    }
  }

  Eigen::MatrixXd basis_;
  std::vector<ScalarCoeff> coeffs_;
  TimeGrid grid_;
  ControlClass tag_;
};

}  // namespace wavespec
