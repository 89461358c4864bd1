#include "rocfit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rocfit/error.hpp"

namespace rocfit {

namespace {

double diameter(const std::vector<std::vector<double>>& simplex, std::size_t best) {
  double d = 0.0;
  for (const auto& v : simplex) {
    for (std::size_t i = 0; i < v.size(); ++i) d = std::max(d, std::fabs(v[i] - simplex[best][i]));
  }
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadSettings& settings) {
  const std::size_t k = x0.size();
  if (k == 0) throw ValidationError("nelder_mead: empty starting point");

  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };

  std::vector<std::vector<double>> simplex(k + 1, x0);
  for (std::size_t i = 0; i < k; ++i) simplex[i + 1][i] += settings.initial_step;
  std::vector<double> values(k + 1);
  for (std::size_t i = 0; i <= k; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(k + 1);
  std::vector<double> centroid(k);
  std::vector<double> trial(k);
  std::vector<double> trial2(k);

  while (true) {
    // Stable sort keeps the ordering deterministic among ties.
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[k - 1];

    if (diameter(simplex, best) < settings.tolerance) {
      result.converged = true;
      break;
    }
    if (result.iterations >= settings.max_iterations) break;
    ++result.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t j = 0; j <= k; ++j) {
      if (j == worst) continue;
      for (std::size_t i = 0; i < k; ++i) centroid[i] += simplex[j][i] / static_cast<double>(k);
    }

    for (std::size_t i = 0; i < k; ++i) trial[i] = centroid[i] + (centroid[i] - simplex[worst][i]);
    const double fr = eval(trial);

    if (fr < values[best]) {
      for (std::size_t i = 0; i < k; ++i) trial2[i] = centroid[i] + 2.0 * (centroid[i] - simplex[worst][i]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }

    const bool outside = fr < values[worst];
    for (std::size_t i = 0; i < k; ++i) {
      trial2[i] = outside ? centroid[i] + 0.5 * (trial[i] - centroid[i])
                          : centroid[i] + 0.5 * (simplex[worst][i] - centroid[i]);
    }
    const double fc = eval(trial2);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }

    for (std::size_t j = 0; j <= k; ++j) {
      if (j == best) continue;
      for (std::size_t i = 0; i < k; ++i) simplex[j][i] = simplex[best][i] + 0.5 * (simplex[j][i] - simplex[best][i]);
      values[j] = eval(simplex[j]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

}  // namespace rocfit
