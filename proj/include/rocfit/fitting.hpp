#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rocfit/models.hpp"
#include "rocfit/roc_core.hpp"

namespace rocfit {

enum class Constraint { unrestricted, concave };

std::string_view constraint_name(Constraint c);
Constraint parse_constraint(std::string_view name);

struct OptimizerSettings {
  int restarts = 5;            // total simplex runs
  int max_iterations = 0;      // per run; 0 means 500 * k
  double simplex_tolerance = 1e-8;
};

struct FitConfig {
  Family family = Family::beta2;
  Constraint constraint = Constraint::unrestricted;
  OptimizerSettings optimizer;
  std::size_t panel_nodes = 16;  // Gauss-Legendre nodes per panel for the reference distance
  /// Parameter vectors tried before the generated seeds.
  std::vector<std::vector<double>> extra_seeds;

  /// Throws ValidationError for unfittable families or bad settings.
  void validate() const;
};

struct BoundaryFlags {
  bool concave_edge = false;  // beta on the line beta = 2 - alpha
  bool alpha_one = false;     // concave beta with alpha at 1
  bool mu_zero = false;
  bool gamma_zero = false;
  bool delta_one = false;
  bool box_limit = false;     // a parameter at the search box edge

  bool any() const { return concave_edge || alpha_one || mu_zero || gamma_zero || delta_one || box_limit; }
};

struct FitResult {
  Family family = Family::beta2;
  Constraint constraint = Constraint::unrestricted;
  std::vector<double> theta;
  double distance = 0.0;
  BoundaryFlags boundary;
  int iterations = 0;
  int evaluations = 0;
  int restarts = 0;
  bool converged = false;

  RocModel model() const { return RocModel::from_params(family, theta); }
};

/// L2 distance between the empirical curve and the model, by Gauss-Legendre
/// quadrature on panels bounded by the empirical breakpoints (and delta).
double l2_distance(const EmpiricalRoc& curve, const RocModel& model, std::size_t panel_nodes = 16);

/// Fast squared-distance evaluator for one curve and one family.
///
/// Beta families integrate the cross term analytically through the antiderivatives
/// of the incomplete beta function; binormal uses width-adaptive panel rules.
class L2Objective {
 public:
  L2Objective(const EmpiricalRoc& curve, Family family);

  double squared(std::span<const double> theta) const;
  double distance(std::span<const double> theta) const;
  Family family() const { return family_; }

 private:
  struct Panel {
    double x0, x1, y0, slope;
  };
  double squared_binormal(double mu, double sigma) const;
  double squared_beta(const BetaShape& s) const;

  Family family_;
  std::vector<Panel> panels_;
  double e2_ = 0.0;                  // integral of the squared empirical curve
  // binormal: flattened quadrature nodes
  std::vector<double> node_z_, node_w_, node_e_;
  // beta: breakpoints and logs for the cumulative CDF sweep
  std::vector<double> bx_, log_x_, log_1mx_;
  std::vector<double> sweep_log_u_, sweep_log_1mu_;  // 4 nodes per interval
};

FitResult fit_mde(const EmpiricalRoc& curve, const FitConfig& config);

nlohmann::json to_json(const FitResult& fit);

}  // namespace rocfit
