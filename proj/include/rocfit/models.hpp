#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rocfit/numerics.hpp"
#include "rocfit/roc_core.hpp"

namespace rocfit {

enum class Family { binormal, beta2, beta3_gamma, beta3_delta, beta4, beta_mixture };

std::string_view family_name(Family family);
/// Accepts the canonical names plus the CLI aliases "beta", "beta3g", "beta3d".
Family parse_family(std::string_view name);
/// Number of free parameters (0 for mixtures, whose size varies).
std::size_t family_dimension(Family family);

struct BetaComponent {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Beta-family parameters with the straight-edge extensions; gamma = 0, delta = 1 give beta2.
struct BetaShape {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.0;
  double delta = 1.0;
};

/// Parametric ROC curve. Parameter domains are checked at construction.
///
/// Parameter order: binormal (mu, sigma); beta2 (alpha, beta); beta3_gamma
/// (alpha, beta, gamma); beta3_delta (alpha, beta, delta); beta4 (alpha, beta,
/// gamma, delta). Mixtures carry weights and components instead.
class RocModel {
 public:
  static RocModel binormal(double mu, double sigma);
  static RocModel beta2(double alpha, double beta);
  static RocModel beta3_gamma(double alpha, double beta, double gamma);
  static RocModel beta3_delta(double alpha, double beta, double delta);
  static RocModel beta4(double alpha, double beta, double gamma, double delta);
  static RocModel mixture(std::vector<double> weights, std::vector<BetaComponent> components);
  static RocModel from_params(Family family, std::span<const double> params);

  /// Domain check without constructing.
  static bool valid_params(Family family, std::span<const double> params);

  Family family() const { return family_; }
  std::span<const double> params() const { return params_; }
  std::size_t dimension() const { return params_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<BetaComponent>& components() const { return components_; }

  bool is_beta_family() const;
  /// Beta core of beta2, beta3_* and beta4 models.
  BetaShape shape() const;

 private:
  RocModel(Family family, std::vector<double> params) : family_(family), params_(std::move(params)) {}

  Family family_;
  std::vector<double> params_;
  std::vector<double> weights_;
  std::vector<BetaComponent> components_;
};

double roc_eval(const RocModel& model, double p);
/// dR/dp on the open interval (0,1).
double roc_slope(const RocModel& model, double p);
double model_auc(const RocModel& model);
std::string_view auc_descriptor(double auc);
bool is_concave(const RocModel& model);

/// Class-1 marker for uniform u, realizing the model alongside the class-0 reference
/// distribution (standard normal for binormal, standard uniform otherwise).
double class1_inverse_transform(const RocModel& model, double u);
double class0_inverse_transform(const RocModel& model, double u);

/// n0 class-0 draws followed by n1 class-1 draws.
LabeledSample sample_from_model(const RocModel& model, std::size_t n0, std::size_t n1,
                                numerics::RandomStream& rng);

struct ParamGradient {
  std::vector<double> partials;
  bool one_sided = false;  // some step had to be taken one-sidedly near a domain boundary
};

/// Partial derivatives of R(p; theta) in the model's parameter order.
ParamGradient param_gradient(const RocModel& model, double p);

/// Bernstein-type beta mixture from the natural-identification density f(q) = R'(1-q).
/// The returned model's curve approximates R.
RocModel bernstein_mixture(const std::function<double(double)>& density, int order);

nlohmann::json to_json(const RocModel& model);
RocModel model_from_json(const nlohmann::json& j);

}  // namespace rocfit
