#pragma once

#include <stdexcept>
#include <vector>

namespace wavespec {

// Uniform grid 0 = t_0 < ... < t_steps = t_max.
struct TimeGrid {
  double t_max = 1.0;
  int steps = 400;

  TimeGrid() = default;
  TimeGrid(double t_max_, int steps_) : t_max(t_max_), steps(steps_) { validate(); }

  void validate() const {
    if (!(t_max > 0.0)) throw std::invalid_argument("TimeGrid: t_max must be positive");
    if (steps < 1) throw std::invalid_argument("TimeGrid: steps must be at least 1");
  }

  double dt() const { return t_max / steps; }
  int size() const { return steps + 1; }
  double point(int i) const { return t_max * static_cast<double>(i) / steps; }

  std::vector<double> points() const {
    std::vector<double> p(static_cast<std::size_t>(size()));
    for (int i = 0; i <= steps; ++i) p[static_cast<std::size_t>(i)] = point(i);
    return p;
  }
};

}  // namespace wavespec
