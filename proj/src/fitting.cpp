#include "rocfit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rocfit/error.hpp"
#include "rocfit/nelder_mead.hpp"
#include "rocfit/numerics.hpp"

namespace rocfit {

std::string_view constraint_name(Constraint c) { return c == Constraint::concave ? "concave" : "unrestricted"; }

Constraint parse_constraint(std::string_view name) {
  if (name == "unrestricted" || name == "none") return Constraint::unrestricted;
  if (name == "concave") return Constraint::concave;
  throw ValidationError("unknown constraint mode '" + std::string(name) + "'");
}

void FitConfig::validate() const {
  if (family == Family::beta_mixture) throw ValidationError("beta mixtures cannot be fitted by minimum distance");
  if (optimizer.restarts < 1) throw ValidationError("restart count must be >= 1");
  if (optimizer.max_iterations < 0) throw ValidationError("max_iterations must be >= 0");
  if (!(optimizer.simplex_tolerance > 0.0)) throw ValidationError("simplex tolerance must be positive");
  if (panel_nodes < 1) throw ValidationError("panel_nodes must be >= 1");
  for (const auto& seed : extra_seeds) {
    if (!RocModel::valid_params(family, seed)) throw ValidationError("extra seed outside the family domain");
  }
}

namespace {

constexpr double kLogLo = -6.907755278982137;  // ln 1e-3
constexpr double kLogHi = 6.907755278982137;   // ln 1e3
constexpr double kLogitLim = 30.0;
constexpr double kSnap = 1e-8;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) {
  p = std::clamp(p, 1e-13, 1.0 - 1e-13);
  return std::log(p / (1.0 - p));
}

// Maps unconstrained search coordinates to model parameters.
class Parameterization {
 public:
  Parameterization(Family family, Constraint constraint) : family_(family), constraint_(constraint) {
    switch (family) {
      case Family::binormal:
        if (concave()) {
          add(-10.0, 10.0);  // m, mu = m^2
        } else {
          add(-10.0, 10.0);
          add(kLogLo, kLogHi);  // s, sigma = exp(s)
        }
        break;
      default:
        if (concave()) {
          add(-kLogitLim, kLogitLim);  // alpha = logistic(a)
          add(-40.0, kLogHi);          // beta = 2 - alpha + exp(b)
        } else {
          add(kLogLo, kLogHi);
          add(kLogLo, kLogHi);
        }
        if (family == Family::beta3_gamma || family == Family::beta3_delta || family == Family::beta4) {
          add(-kLogitLim, kLogitLim);
        }
        if (family == Family::beta4) add(-kLogitLim, kLogitLim);
        break;
    }
  }

  std::size_t size() const { return lo_.size(); }
  bool concave() const { return constraint_ == Constraint::concave; }

  /// Squared distance of z beyond the search box.
  double excess(std::span<const double> z) const {
    double e = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i] < lo_[i]) e += (lo_[i] - z[i]) * (lo_[i] - z[i]);
      if (z[i] > hi_[i]) e += (z[i] - hi_[i]) * (z[i] - hi_[i]);
    }
    return e;
  }

  std::vector<double> clamp(std::span<const double> z) const {
    std::vector<double> out(z.begin(), z.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo_[i], hi_[i]);
    return out;
  }

  std::vector<double> theta(std::span<const double> z) const {
    std::vector<double> th;
    if (family_ == Family::binormal) {
      th.push_back(z[0] * z[0]);
      th.push_back(concave() ? 1.0 : std::exp(z[1]));
      return th;
    }
    double alpha;
    double beta;
    if (concave()) {
      alpha = logistic(z[0]);
      beta = (2.0 - alpha) + std::exp(z[1]);
    } else {
      alpha = std::exp(z[0]);
      beta = std::exp(z[1]);
    }
    th = {alpha, beta};
    if (family_ == Family::beta3_gamma || family_ == Family::beta3_delta) th.push_back(logistic(z[2]));
    if (family_ == Family::beta4) {
      th.push_back(logistic(z[2]));
      th.push_back(logistic(z[3]));
    }
    return th;
  }

  std::vector<double> coords(std::span<const double> th) const {
    std::vector<double> z;
    if (family_ == Family::binormal) {
      z.push_back(std::sqrt(std::max(th[0], 0.0)));
      if (!concave()) z.push_back(std::log(th[1]));
      return clamp(z);
    }
    if (concave()) {
      const double alpha = std::clamp(th[0], 1e-12, 1.0 - 1e-12);
      z.push_back(logit(alpha));
      z.push_back(std::log(std::max(th[1] - (2.0 - alpha), 1e-17)));
    } else {
      z.push_back(std::log(th[0]));
      z.push_back(std::log(th[1]));
    }
    for (std::size_t i = 2; i < th.size(); ++i) z.push_back(logit(th[i]));
    return clamp(z);
  }

  /// Concave projection of an arbitrary (alpha, beta, ...) starting point.
  std::vector<double> project(std::vector<double> th) const {
    if (family_ == Family::binormal) {
      if (concave()) th[1] = 1.0;
      return th;
    }
    if (concave()) {
      th[0] = std::clamp(th[0], 0.05, 0.999);
      th[1] = std::max(th[1], 2.0 - th[0] + 1e-3);
    }
    return th;
  }

 private:
  void add(double lo, double hi) {
    lo_.push_back(lo);
    hi_.push_back(hi);
  }

  Family family_;
  Constraint constraint_;
  std::vector<double> lo_;
  std::vector<double> hi_;
};

// Snap near-boundary parameters onto the boundary and flag them.
BoundaryFlags snap(Family family, Constraint constraint, const Parameterization& param, std::span<const double> z,
                   std::vector<double>& th) {
  BoundaryFlags flags;
  const std::vector<double> zc = param.clamp(z);
  if (family == Family::binormal) {
    if (th[0] < kSnap) {
      th[0] = 0.0;
      flags.mu_zero = true;
    }
    if (constraint == Constraint::unrestricted && (zc[1] <= kLogLo || zc[1] >= kLogHi)) flags.box_limit = true;
    return flags;
  }
  if (constraint == Constraint::concave) {
    if (std::exp(zc[1]) < kSnap) {
      th[1] = 2.0 - th[0];
      flags.concave_edge = true;
    }
    if (th[0] > 1.0 - kSnap) flags.alpha_one = true;
    if (zc[1] >= kLogHi) flags.box_limit = true;
  } else {
    for (std::size_t i = 0; i < 2; ++i) {
      if (zc[i] <= kLogLo || zc[i] >= kLogHi) flags.box_limit = true;
    }
  }
  auto snap_gamma = [&](double& g) {
    if (g < kSnap) {
      g = 0.0;
      flags.gamma_zero = true;
    }
  };
  auto snap_delta = [&](double& d) {
    if (d > 1.0 - kSnap) {
      d = 1.0;
      flags.delta_one = true;
    }
  };
  if (family == Family::beta3_gamma) snap_gamma(th[2]);
  if (family == Family::beta3_delta) snap_delta(th[2]);
  if (family == Family::beta4) {
    snap_gamma(th[2]);
    snap_delta(th[3]);
  }
  return flags;
}

// Straight-edge defaults for seeds built from an (alpha, beta) core.
std::vector<double> extend_core(Family family, double alpha, double beta, double gamma = 0.05, double delta = 0.95) {
  std::vector<double> th = {alpha, beta};
  if (family == Family::beta3_gamma) th.push_back(gamma);
  if (family == Family::beta3_delta) th.push_back(delta);
  if (family == Family::beta4) {
    th.push_back(gamma);
    th.push_back(delta);
  }
  return th;
}

std::vector<double> probit_seed(const EmpiricalRoc& curve, bool fixed_sigma) {
  std::vector<double> zx;
  std::vector<double> zy;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double f = curve.far(i);
    const double h = curve.hr(i);
    if (f > 0.0 && f < 1.0 && h > 0.0 && h < 1.0) {
      zx.push_back(numerics::normal_quantile(f));
      zy.push_back(numerics::normal_quantile(h));
    }
  }
  const double auc = std::clamp(empirical_auc(curve), 0.51, 0.999);
  const double mu_auc = std::sqrt(2.0) * numerics::normal_quantile(auc);
  if (zx.empty()) return {mu_auc, 1.0};
  const double nz = static_cast<double>(zx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < zx.size(); ++i) {
    mx += zx[i] / nz;
    my += zy[i] / nz;
  }
  if (fixed_sigma) return {std::max(my - mx, 0.0), 1.0};
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < zx.size(); ++i) {
    sxx += (zx[i] - mx) * (zx[i] - mx);
    sxy += (zx[i] - mx) * (zy[i] - my);
  }
  if (zx.size() < 2 || !(sxx > 0.0) || !(sxy > 0.0)) return {mu_auc, 1.0};
  const double sigma = sxy / sxx;
  const double mu = my - sigma * mx;
  return {std::max(mu, 0.0), std::clamp(sigma, 1e-3, 1e3)};
}

struct Candidate {
  std::vector<double> theta;
  double squared;
  BoundaryFlags flags;
  bool converged;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.squared != b.squared) return a.squared < b.squared;
  return std::lexicographical_compare(a.theta.begin(), a.theta.end(), b.theta.begin(), b.theta.end());
}

}  // namespace

FitResult fit_mde(const EmpiricalRoc& curve, const FitConfig& config) {
  config.validate();
  const Family family = config.family;
  const Parameterization param(family, config.constraint);
  const L2Objective objective(curve, family);
  const std::size_t k = param.size();

  FitResult result;
  result.family = family;
  result.constraint = config.constraint;

  auto value_at = [&](std::span<const double> z) {
    const std::vector<double> zc = param.clamp(z);
    const std::vector<double> th = param.theta(zc);
    if (!RocModel::valid_params(family, th)) return HUGE_VAL;
    return objective.squared(th) + param.excess(z);
  };

  // Seeds in parameter space, in priority order.
  std::vector<std::vector<double>> seeds;
  for (const auto& s : config.extra_seeds) seeds.push_back(param.project(s));

  std::vector<double> nested_core;  // beta2 optimum, for the straight-edge families
  if (family == Family::binormal) {
    const bool fixed = config.constraint == Constraint::concave;
    seeds.push_back(probit_seed(curve, fixed));
    std::vector<double> best_grid;
    double best_value = HUGE_VAL;
    for (double mu : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
      for (double sigma : {0.5, 0.75, 1.0, 1.5, 2.0}) {
        if (fixed && sigma != 1.0) continue;
        const std::vector<double> th = {mu, sigma};
        const double v = objective.squared(th);
        if (v < best_value) {
          best_value = v;
          best_grid = th;
        }
      }
    }
    seeds.push_back(best_grid);
  } else {
    if (family != Family::beta2) {
      FitConfig core = config;
      core.family = Family::beta2;
      core.extra_seeds.clear();
      const FitResult base = fit_mde(curve, core);
      nested_core = base.theta;
      result.iterations += base.iterations;
      result.evaluations += base.evaluations;
      seeds.push_back(param.project(extend_core(family, base.theta[0], base.theta[1], 1e-6, 1.0 - 1e-6)));
    }
    std::vector<double> best_grid;
    double best_value = HUGE_VAL;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const double step = std::log(20.0 / 0.05) / 7.0;
        const double alpha = 0.05 * std::exp(step * i);
        const double beta = 0.05 * std::exp(step * j);
        const std::vector<double> th = param.project(extend_core(family, alpha, beta));
        const double v = objective.squared(th);
        if (v < best_value) {
          best_value = v;
          best_grid = th;
        }
      }
    }
    seeds.push_back(best_grid);
    const double auc = std::clamp(empirical_auc(curve), 0.51, 0.999);
    if (config.constraint == Constraint::concave) {
      const double alpha = std::clamp(2.0 * (1.0 - auc), 0.05, 0.999);
      const double beta = std::max(alpha * auc / (1.0 - auc), 2.0 - alpha);
      seeds.push_back(param.project(extend_core(family, alpha, beta)));
    } else {
      seeds.push_back(extend_core(family, 1.0, auc / (1.0 - auc)));
    }
  }

  NelderMeadSettings nm;
  nm.initial_step = 0.25;
  nm.tolerance = config.optimizer.simplex_tolerance;
  nm.max_iterations = config.optimizer.max_iterations > 0 ? config.optimizer.max_iterations
                                                          : 500 * static_cast<int>(k);

  Candidate best{{}, HUGE_VAL, {}, false};
  std::vector<double> best_z;
  for (int run = 0; run < config.optimizer.restarts; ++run) {
    std::vector<double> z0;
    if (static_cast<std::size_t>(run) < seeds.size()) z0 = param.coords(seeds[static_cast<std::size_t>(run)]);
    else z0 = best_z;
    const NelderMeadResult nmr = nelder_mead(value_at, z0, nm);
    result.iterations += nmr.iterations;
    result.evaluations += nmr.evaluations;
    ++result.restarts;

    const std::vector<double> zc = param.clamp(nmr.x);
    std::vector<double> th = param.theta(zc);
    const BoundaryFlags flags = snap(family, config.constraint, param, zc, th);
    Candidate cand{th, objective.squared(th), flags, nmr.converged};
    if (best_z.empty() || better(cand, best)) {
      best = cand;
      best_z = zc;
    }
  }

  // The nested beta2 optimum is itself a member of every straight-edge family.
  if (!nested_core.empty()) {
    std::vector<double> th = extend_core(family, nested_core[0], nested_core[1], 0.0, 1.0);
    const double v = objective.squared(th);
    if (v < best.squared) {
      BoundaryFlags flags;
      flags.gamma_zero = family == Family::beta3_gamma || family == Family::beta4;
      flags.delta_one = family == Family::beta3_delta || family == Family::beta4;
      if (config.constraint == Constraint::concave && th[1] == 2.0 - th[0]) flags.concave_edge = true;
      best = Candidate{th, v, flags, true};
    }
  }

  if (config.constraint == Constraint::concave && !is_concave(RocModel::from_params(family, best.theta))) {
    throw NumericalError("fit_mde: concave fit violates the concavity predicate");
  }
  result.theta = best.theta;
  result.distance = std::sqrt(best.squared);
  result.boundary = best.flags;
  result.converged = best.converged;
  return result;
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json j;
  j["family"] = std::string(family_name(fit.family));
  j["constraint"] = std::string(constraint_name(fit.constraint));
  j["theta"] = fit.theta;
  j["fit"] = fit.distance;
  j["auc"] = model_auc(fit.model());
  j["is_concave"] = is_concave(fit.model());
  j["converged"] = fit.converged;
  j["boundary"] = {{"concave_edge", fit.boundary.concave_edge}, {"alpha_one", fit.boundary.alpha_one},
                   {"mu_zero", fit.boundary.mu_zero},           {"gamma_zero", fit.boundary.gamma_zero},
                   {"delta_one", fit.boundary.delta_one},       {"box_limit", fit.boundary.box_limit}};
  j["optimizer"] = {{"iterations", fit.iterations}, {"evaluations", fit.evaluations}, {"restarts", fit.restarts}};
  return j;
}

}  // namespace rocfit
