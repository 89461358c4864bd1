#include "rocfit/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rocfit/error.hpp"

namespace rocfit {

using numerics::normal_cdf;
using numerics::normal_pdf;
using numerics::normal_quantile;

std::string_view family_name(Family family) {
  switch (family) {
    case Family::binormal: return "binormal";
    case Family::beta2: return "beta2";
    case Family::beta3_gamma: return "beta3_gamma";
    case Family::beta3_delta: return "beta3_delta";
    case Family::beta4: return "beta4";
    case Family::beta_mixture: return "beta_mixture";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "binormal") return Family::binormal;
  if (name == "beta" || name == "beta2") return Family::beta2;
  if (name == "beta3_gamma" || name == "beta3g") return Family::beta3_gamma;
  if (name == "beta3_delta" || name == "beta3d") return Family::beta3_delta;
  if (name == "beta4") return Family::beta4;
  if (name == "beta_mixture" || name == "mixture") return Family::beta_mixture;
  throw ValidationError("unknown model family '" + std::string(name) + "'");
}

std::size_t family_dimension(Family family) {
  switch (family) {
    case Family::binormal:
    case Family::beta2: return 2;
    case Family::beta3_gamma:
    case Family::beta3_delta: return 3;
    case Family::beta4: return 4;
    case Family::beta_mixture: return 0;
  }
  return 0;
}

bool RocModel::valid_params(Family family, std::span<const double> p) {
  if (family == Family::beta_mixture) return false;
  if (p.size() != family_dimension(family)) return false;
  for (double v : p) {
    if (!std::isfinite(v)) return false;
  }
  switch (family) {
    case Family::binormal: return p[0] >= 0.0 && p[1] > 0.0;
    case Family::beta2: return p[0] > 0.0 && p[1] > 0.0;
    case Family::beta3_gamma: return p[0] > 0.0 && p[1] > 0.0 && p[2] >= 0.0 && p[2] <= 1.0;
    case Family::beta3_delta: return p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0 && p[2] <= 1.0;
    case Family::beta4:
      return p[0] > 0.0 && p[1] > 0.0 && p[2] >= 0.0 && p[2] <= 1.0 && p[3] > 0.0 && p[3] <= 1.0;
    case Family::beta_mixture: return false;
  }
  return false;
}

RocModel RocModel::from_params(Family family, std::span<const double> params) {
  if (family == Family::beta_mixture) throw ValidationError("mixtures are built with RocModel::mixture");
  if (!valid_params(family, params)) {
    std::string msg = "parameters outside the domain of family ";
    msg += family_name(family);
    throw ValidationError(msg);
  }
  return RocModel(family, std::vector<double>(params.begin(), params.end()));
}

RocModel RocModel::binormal(double mu, double sigma) {
  const double p[] = {mu, sigma};
  return from_params(Family::binormal, p);
}

RocModel RocModel::beta2(double alpha, double beta) {
  const double p[] = {alpha, beta};
  return from_params(Family::beta2, p);
}

RocModel RocModel::beta3_gamma(double alpha, double beta, double gamma) {
  const double p[] = {alpha, beta, gamma};
  return from_params(Family::beta3_gamma, p);
}

RocModel RocModel::beta3_delta(double alpha, double beta, double delta) {
  const double p[] = {alpha, beta, delta};
  return from_params(Family::beta3_delta, p);
}

RocModel RocModel::beta4(double alpha, double beta, double gamma, double delta) {
  const double p[] = {alpha, beta, gamma, delta};
  return from_params(Family::beta4, p);
}

RocModel RocModel::mixture(std::vector<double> weights, std::vector<BetaComponent> components) {
  if (weights.empty() || weights.size() != components.size()) {
    throw ValidationError("mixture needs one weight per component");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) throw ValidationError("mixture weights must be >= 0");
    if (!(components[k].alpha > 0.0) || !(components[k].beta > 0.0) || !std::isfinite(components[k].alpha) ||
        !std::isfinite(components[k].beta)) {
      throw ValidationError("mixture component parameters must be positive");
    }
    total += weights[k];
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ValidationError("mixture weights must sum to 1");
  RocModel model(Family::beta_mixture, {});
  model.weights_ = std::move(weights);
  model.components_ = std::move(components);
  return model;
}

bool RocModel::is_beta_family() const {
  return family_ == Family::beta2 || family_ == Family::beta3_gamma || family_ == Family::beta3_delta ||
         family_ == Family::beta4;
}

BetaShape RocModel::shape() const {
  switch (family_) {
    case Family::beta2: return {params_[0], params_[1], 0.0, 1.0};
    case Family::beta3_gamma: return {params_[0], params_[1], params_[2], 1.0};
    case Family::beta3_delta: return {params_[0], params_[1], 0.0, params_[2]};
    case Family::beta4: return {params_[0], params_[1], params_[2], params_[3]};
    default: throw ValidationError("shape(): not a beta-family model");
  }
}

double roc_eval(const RocModel& model, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("roc_eval: p must lie in [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  switch (model.family()) {
    case Family::binormal: {
      const auto th = model.params();
      return normal_cdf(th[0] + th[1] * normal_quantile(p));
    }
    case Family::beta_mixture: {
      double r = 0.0;
      for (std::size_t k = 0; k < model.weights().size(); ++k) {
        const auto& c = model.components()[k];
        r += model.weights()[k] * numerics::reg_inc_beta(c.alpha, c.beta, p);
      }
      return std::min(r, 1.0);
    }
    default: {
      const BetaShape s = model.shape();
      if (p >= s.delta) return 1.0;
      return s.gamma + (1.0 - s.gamma) * numerics::reg_inc_beta(s.alpha, s.beta, p / s.delta);
    }
  }
}

double roc_slope(const RocModel& model, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("roc_slope: p must lie strictly inside (0,1)");
  switch (model.family()) {
    case Family::binormal: {
      const auto th = model.params();
      const double z = normal_quantile(p);
      return th[1] * normal_pdf(th[0] + th[1] * z) / normal_pdf(z);
    }
    case Family::beta_mixture: {
      double r = 0.0;
      for (std::size_t k = 0; k < model.weights().size(); ++k) {
        const auto& c = model.components()[k];
        r += model.weights()[k] * numerics::beta_density(c.alpha, c.beta, p);
      }
      return r;
    }
    default: {
      const BetaShape s = model.shape();
      if (p >= s.delta) return 0.0;
      return (1.0 - s.gamma) / s.delta * numerics::beta_density(s.alpha, s.beta, p / s.delta);
    }
  }
}

double model_auc(const RocModel& model) {
  switch (model.family()) {
    case Family::binormal: {
      const auto th = model.params();
      return normal_cdf(th[0] / std::sqrt(1.0 + th[1] * th[1]));
    }
    case Family::beta2: {
      const auto th = model.params();
      return th[1] / (th[0] + th[1]);
    }
    case Family::beta_mixture: {
      double auc = 0.0;
      for (std::size_t k = 0; k < model.weights().size(); ++k) {
        const auto& c = model.components()[k];
        auc += model.weights()[k] * c.beta / (c.alpha + c.beta);
      }
      return auc;
    }
    default: {
      // Integrating the incomplete beta over [0, 1] gives b / (a + b); the curve equals 1 beyond delta.
      const BetaShape s = model.shape();
      return s.delta * (s.gamma + (1.0 - s.gamma) * s.beta / (s.alpha + s.beta)) + (1.0 - s.delta);
    }
  }
}

std::string_view auc_descriptor(double auc) {
  if (auc > 0.99) return "nearly perfect";
  if (auc > 0.95) return "very strong";
  if (auc > 0.85) return "strong";
  if (auc > 0.75) return "substantial";
  if (auc > 0.65) return "moderate";
  if (auc > 0.50) return "weak";
  return "abysmal";
}

bool is_concave(const RocModel& model) {
  auto beta_concave = [](double a, double b) { return a <= 1.0 && b >= 2.0 - a; };
  switch (model.family()) {
    case Family::binormal: return std::fabs(model.params()[1] - 1.0) <= 1e-12;
    case Family::beta_mixture:
      return std::all_of(model.components().begin(), model.components().end(),
                         [&](const BetaComponent& c) { return beta_concave(c.alpha, c.beta); });
    default: {
      const BetaShape s = model.shape();
      return beta_concave(s.alpha, s.beta);
    }
  }
}

namespace {

// Generalized inverse of the curve: inf { p : R(p) >= v }.
double roc_inverse(const RocModel& model, double v) {
  if (model.family() == Family::beta_mixture) {
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (roc_eval(model, mid) >= v) hi = mid; else lo = mid;
    }
    return hi;
  }
  const BetaShape s = model.shape();
  if (v <= s.gamma) return 0.0;
  const double w = (v - s.gamma) / (1.0 - s.gamma);
  if (w >= 1.0) return s.delta;
  return s.delta * numerics::beta_quantile(s.alpha, s.beta, w);
}

}  // namespace

double class0_inverse_transform(const RocModel& model, double u) {
  return model.family() == Family::binormal ? normal_quantile(u) : u;
}

double class1_inverse_transform(const RocModel& model, double u) {
  if (model.family() == Family::binormal) {
    const auto th = model.params();
    return (th[0] + normal_quantile(u)) / th[1];
  }
  // Natural identification: F1(x) = 1 - R(1 - x), so X = 1 - R^{-1}(1 - U).
  return 1.0 - roc_inverse(model, 1.0 - u);
}

LabeledSample sample_from_model(const RocModel& model, std::size_t n0, std::size_t n1, numerics::RandomStream& rng) {
  if (n0 < 1 || n1 < 1) throw ValidationError("sample_from_model: both class sizes must be >= 1");
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(n0 + n1);
  labels.reserve(n0 + n1);
  for (std::size_t i = 0; i < n0; ++i) {
    scores.push_back(class0_inverse_transform(model, rng.uniform()));
    labels.push_back(0);
  }
  for (std::size_t i = 0; i < n1; ++i) {
    scores.push_back(class1_inverse_transform(model, rng.uniform()));
    labels.push_back(1);
  }
  return LabeledSample(std::move(scores), std::move(labels));
}

ParamGradient param_gradient(const RocModel& model, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("param_gradient: p must lie strictly inside (0,1)");
  ParamGradient out;
  if (model.family() == Family::beta_mixture) throw ValidationError("param_gradient: mixtures have no parameter vector");
  if (model.family() == Family::binormal) {
    const auto th = model.params();
    const double z = normal_quantile(p);
    const double dens = normal_pdf(th[0] + th[1] * z);
    out.partials = {dens, z * dens};
    return out;
  }

  // Central differences, falling back to one-sided steps at the domain edge.
  const Family family = model.family();
  std::vector<double> theta(model.params().begin(), model.params().end());
  out.partials.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::fabs(theta[i]));
    std::vector<double> up = theta;
    std::vector<double> down = theta;
    up[i] += h;
    down[i] -= h;
    const bool up_ok = RocModel::valid_params(family, up);
    const bool down_ok = RocModel::valid_params(family, down);
    if (up_ok && down_ok) {
      out.partials[i] = (roc_eval(RocModel::from_params(family, up), p) -
                         roc_eval(RocModel::from_params(family, down), p)) / (2.0 * h);
    } else if (up_ok) {
      out.partials[i] = (roc_eval(RocModel::from_params(family, up), p) - roc_eval(model, p)) / h;
      out.one_sided = true;
    } else if (down_ok) {
      out.partials[i] = (roc_eval(model, p) - roc_eval(RocModel::from_params(family, down), p)) / h;
      out.one_sided = true;
    } else {
      throw ValidationError("param_gradient: parameter domain too narrow for a finite difference");
    }
  }
  return out;
}

RocModel bernstein_mixture(const std::function<double(double)>& density, int order) {
  if (order < 0) throw ValidationError("bernstein_mixture: order must be >= 0");
  if (order == 0) return RocModel::mixture({1.0}, {{1.0, 1.0}});

  const int n = order;
  std::vector<double> raw(static_cast<std::size_t>(n) + 1);
  double total = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double q = static_cast<double>(k) / n;
    const double f = density(q);
    if (!std::isfinite(f) || f < 0.0) {
      throw ValidationError("bernstein_mixture: density sample at q=" + std::to_string(q) +
                            " is not a finite nonnegative number");
    }
    raw[static_cast<std::size_t>(k)] = f;
    total += f;
  }
  // a_n = (1/(n+1)) sum f(k/n); normalized weights are f(k/n) / sum f.
  if (!(total > 0.0)) throw ValidationError("bernstein_mixture: density samples are all zero");

  // Component Beta(k+1, n-k+1) approximates F_NI; reflecting p -> 1-p swaps the shapes.
  std::vector<double> weights(raw.size());
  std::vector<BetaComponent> components(raw.size());
  for (int k = 0; k <= n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    weights[i] = raw[i] / total;
    components[i] = {static_cast<double>(n - k + 1), static_cast<double>(k + 1)};
  }
  return RocModel::mixture(std::move(weights), std::move(components));
}

nlohmann::json to_json(const RocModel& model) {
  nlohmann::json j;
  j["family"] = std::string(family_name(model.family()));
  if (model.family() == Family::beta_mixture) {
    std::vector<double> flat;
    for (const auto& c : model.components()) {
      flat.push_back(c.alpha);
      flat.push_back(c.beta);
    }
    j["theta"] = flat;
    j["weights"] = model.weights();
  } else {
    j["theta"] = std::vector<double>(model.params().begin(), model.params().end());
  }
  return j;
}

RocModel model_from_json(const nlohmann::json& j) {
  try {
    const Family family = parse_family(j.at("family").get<std::string>());
    const auto theta = j.at("theta").get<std::vector<double>>();
    if (family == Family::beta_mixture) {
      const auto weights = j.at("weights").get<std::vector<double>>();
      if (theta.size() != 2 * weights.size()) throw ValidationError("mixture theta must hold (alpha, beta) pairs");
      std::vector<BetaComponent> comps;
      for (std::size_t k = 0; k < weights.size(); ++k) comps.push_back({theta[2 * k], theta[2 * k + 1]});
      return RocModel::mixture(weights, std::move(comps));
    }
    return RocModel::from_params(family, theta);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace rocfit
