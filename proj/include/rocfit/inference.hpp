#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "rocfit/fitting.hpp"
#include "rocfit/models.hpp"
#include "rocfit/roc_core.hpp"

namespace rocfit {

/// Covariance function of the limit process of the scaled difference process.
double kernel_K(const RocModel& model, double lambda, double s, double t);

/// Asymptotic covariance Sigma = C^-1 A C^-1 of the minimum-distance estimator.
///
/// Sigma is the limit covariance of sqrt(n0) (theta_hat - theta0), the scaling under
/// which the class-1 term of the kernel carries the factor lambda = n0/n1.
struct CovarianceEstimate {
  Family family = Family::beta2;
  std::vector<double> theta;
  Eigen::MatrixXd A;
  Eigen::MatrixXd C;
  Eigen::MatrixXd sigma;
  double lambda = 1.0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  std::size_t nodes_2d = 0;
  std::size_t nodes_1d = 0;
  std::vector<std::string> warnings;

  std::size_t n() const { return n0 + n1; }
  /// Approximate covariance of theta_hat itself.
  Eigen::MatrixXd sampling_covariance() const { return sigma / static_cast<double>(n0); }
};

/// Plug-in estimate at the model's parameters. Binormal and beta2 only.
CovarianceEstimate asymptotic_covariance(const RocModel& model, std::size_t n0, std::size_t n1);
/// Refuses boundary-active and fixed-sigma fits.
CovarianceEstimate asymptotic_covariance(const FitResult& fit, std::size_t n0, std::size_t n1);

/// dAUC/dtheta in closed form (binormal, beta2).
std::vector<double> auc_gradient(const RocModel& model);

struct AucInference {
  double auc = 0.0;
  double standard_error = 0.0;
  std::vector<double> gradient;
};

AucInference auc_inference(const RocModel& model, const CovarianceEstimate& cov);

struct EllipsePoint {
  double x = 0.0;
  double y = 0.0;
  bool concave = false;
};

/// Contour of the Wald region for a bivariate sampling covariance, 360 points by default.
std::vector<EllipsePoint> confidence_ellipse(Family family, std::span<const double> theta,
                                             const Eigen::Matrix2d& sampling_cov, double level,
                                             std::size_t points = 360);
std::vector<EllipsePoint> confidence_ellipse(std::span<const double> theta, const CovarianceEstimate& cov,
                                             double level, std::size_t points = 360);

struct BandPoint {
  double p = 0.0;
  double fitted = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct ConfidenceBand {
  std::vector<BandPoint> points;
  double level = 0.95;
  std::size_t draws = 0;
  std::size_t rejected = 0;
  std::uint64_t seed = 0;
};

/// Pointwise envelope of curves drawn from Normal(theta_hat, sampling covariance).
/// Draw d uses RandomStream(seed, d); out-of-domain draws are discarded.
ConfidenceBand confidence_band(const RocModel& model, const Eigen::MatrixXd& sampling_cov,
                               std::span<const double> grid, double level, std::size_t draws, std::uint64_t seed);
ConfidenceBand confidence_band(const RocModel& model, const CovarianceEstimate& cov, std::span<const double> grid,
                               double level, std::size_t draws, std::uint64_t seed);

enum class NullDistribution { chi_square, standard_normal, monte_carlo };

struct TestResult {
  double statistic = 0.0;
  NullDistribution null = NullDistribution::chi_square;
  int dof = 0;
  double p_value = 1.0;
  std::vector<double> replicates;  // Monte Carlo distances d_1..d_M
  std::uint64_t seed = 0;
  std::size_t redraws = 0;        // replicates re-drawn after a non-converged fit
  std::size_t nonconverged = 0;   // replicates kept non-converged after the redraw
  std::optional<FitResult> fit;   // data fit for goodness of fit
  std::vector<std::string> warnings;
};

/// (#{d_data <= d_i} + 1) / (M + 1)
double monte_carlo_p_value(double d_data, std::span<const double> replicates);

/// Parametric-bootstrap goodness-of-fit test with M refitted replicates.
/// Replicate m is sampled from RandomStream(seed, m), its redraw from RandomStream(seed, M + m).
TestResult gof_test(const LabeledSample& sample, const FitConfig& config, std::size_t M, std::uint64_t seed);

/// delta' pooled^-1 delta against chi-square with dim(delta) degrees of freedom.
TestResult wald_test(std::span<const double> delta, const Eigen::MatrixXd& pooled);
/// Two-sided normal test of diff / se.
TestResult z_test(double diff, double se);

/// Independent samples only; pooled covariance is the sum of the two sampling covariances.
TestResult curve_equality_test(const FitResult& a, const CovarianceEstimate& cov_a, const FitResult& b,
                               const CovarianceEstimate& cov_b);
TestResult auc_equality_test(const FitResult& a, const CovarianceEstimate& cov_a, const FitResult& b,
                             const CovarianceEstimate& cov_b);

nlohmann::json to_json(const CovarianceEstimate& cov);
nlohmann::json to_json(const TestResult& test);

}  // namespace rocfit
