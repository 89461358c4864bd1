#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rocfit {

struct NelderMeadSettings {
  double initial_step = 0.25;
  double tolerance = 1e-8;  // simplex diameter, max-norm
  int max_iterations = 1000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free minimization from an axis-aligned initial simplex around x0.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadSettings& settings);

}  // namespace rocfit
