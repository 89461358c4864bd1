#include "rocfit/inference.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "rocfit/error.hpp"
#include "rocfit/kernels.hpp"
#include "rocfit/numerics.hpp"

namespace rocfit {

double kernel_K(const RocModel& model, double lambda, double s, double t) {
  if (!(lambda > 0.0)) throw ValidationError("kernel_K: lambda must be positive");
  if (!(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0)) throw ValidationError("kernel_K: s and t must lie inside (0,1)");
  const double rs = roc_eval(model, s);
  const double rt = roc_eval(model, t);
  return lambda * (std::min(rs, rt) - rs * rt) + roc_slope(model, s) * roc_slope(model, t) * (std::min(s, t) - s * t);
}

CovarianceEstimate asymptotic_covariance(const RocModel& model, std::size_t n0, std::size_t n1) {
  if (model.family() != Family::binormal && model.family() != Family::beta2) {
    throw ValidationError("asymptotic covariance is available for the binormal and beta2 families only");
  }
  if (n0 < 1 || n1 < 1) throw ValidationError("asymptotic covariance needs n0, n1 >= 1");

  CovarianceEstimate cov;
  cov.family = model.family();
  cov.theta.assign(model.params().begin(), model.params().end());
  cov.n0 = n0;
  cov.n1 = n1;
  cov.lambda = static_cast<double>(n0) / static_cast<double>(n1);
  if (cov.lambda >= 1.0) cov.warnings.push_back("lambda = n0/n1 >= 1; plugged in as observed");
  const auto k = static_cast<Eigen::Index>(model.dimension());

  const auto& rule2 = numerics::default_rule_2d();
  kernels::KernelGrid grid;
  grid.lambda = cov.lambda;
  grid.gradient.resize(static_cast<Eigen::Index>(rule2.size()), k);
  for (std::size_t i = 0; i < rule2.size(); ++i) {
    const double p = rule2.nodes()[i];
    grid.nodes.push_back(p);
    grid.weights.push_back(rule2.weights()[i]);
    grid.roc.push_back(roc_eval(model, p));
    grid.slope.push_back(roc_slope(model, p));
    const ParamGradient g = param_gradient(model, p);
    for (Eigen::Index j = 0; j < k; ++j) grid.gradient(static_cast<Eigen::Index>(i), j) = g.partials[j];
  }
  cov.A = kernels::kernel_quadratic_form(grid);
  cov.nodes_2d = rule2.size();

  const auto& rule1 = numerics::default_rule_1d();
  cov.C = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < rule1.size(); ++i) {
    const ParamGradient g = param_gradient(model, rule1.nodes()[i]);
    const Eigen::Map<const Eigen::VectorXd> v(g.partials.data(), k);
    cov.C += rule1.weights()[i] * v * v.transpose();
  }
  cov.nodes_1d = rule1.size();

  const Eigen::LLT<Eigen::MatrixXd> llt(cov.C);
  if (llt.info() != Eigen::Success) throw NumericalError("asymptotic covariance: C is not positive definite");
  const Eigen::MatrixXd cinv = llt.solve(Eigen::MatrixXd::Identity(k, k));
  cov.sigma = cinv * cov.A * cinv;
  cov.sigma = 0.5 * (cov.sigma + cov.sigma.transpose());
  return cov;
}

CovarianceEstimate asymptotic_covariance(const FitResult& fit, std::size_t n0, std::size_t n1) {
  if (fit.boundary.any()) {
    std::string which;
    if (fit.boundary.concave_edge) which += " beta=2-alpha";
    if (fit.boundary.alpha_one) which += " alpha=1";
    if (fit.boundary.mu_zero) which += " mu=0";
    if (fit.boundary.gamma_zero) which += " gamma=0";
    if (fit.boundary.delta_one) which += " delta=1";
    if (fit.boundary.box_limit) which += " search-box edge";
    throw ValidationError("covariance refused: the fit lies on the parameter boundary (" + which.substr(1) +
                          "); asymptotic normality needs an interior estimate, use the Monte Carlo test instead");
  }
  if (fit.family == Family::binormal && fit.constraint == Constraint::concave) {
    throw ValidationError("covariance refused: concave binormal fits hold sigma fixed at 1");
  }
  return asymptotic_covariance(fit.model(), n0, n1);
}

std::vector<double> auc_gradient(const RocModel& model) {
  const auto th = model.params();
  if (model.family() == Family::binormal) {
    const double d = std::sqrt(1.0 + th[1] * th[1]);
    const double dens = numerics::normal_pdf(th[0] / d);
    return {dens / d, -th[0] * th[1] * dens / (d * d * d)};
  }
  if (model.family() == Family::beta2) {
    const double s = (th[0] + th[1]) * (th[0] + th[1]);
    return {-th[1] / s, th[0] / s};
  }
  throw ValidationError("closed-form AUC gradient is available for the binormal and beta2 families only");
}

AucInference auc_inference(const RocModel& model, const CovarianceEstimate& cov) {
  AucInference out;
  out.auc = model_auc(model);
  out.gradient = auc_gradient(model);
  const Eigen::Map<const Eigen::VectorXd> g(out.gradient.data(), static_cast<Eigen::Index>(out.gradient.size()));
  if (g.size() != cov.sigma.rows()) throw ValidationError("auc_inference: covariance does not match the model");
  const double var = g.dot(cov.sampling_covariance() * g);
  out.standard_error = std::sqrt(std::max(var, 0.0));
  return out;
}

std::vector<EllipsePoint> confidence_ellipse(Family family, std::span<const double> theta,
                                             const Eigen::Matrix2d& sampling_cov, double level, std::size_t points) {
  if (theta.size() != 2) throw ValidationError("confidence ellipse needs a two-parameter model");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0,1)");
  if (points < 3) throw ValidationError("confidence ellipse needs at least 3 points");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(sampling_cov);
  const Eigen::Vector2d d = eig.eigenvalues();
  if (!(d(0) > 1e-14 * std::max(d(1), 0.0)) || !(d(1) > 0.0)) {
    throw ValidationError("confidence ellipse: covariance is singular");
  }
  const double q = numerics::chi_square_quantile(level, 2);
  const Eigen::Matrix2d root = eig.eigenvectors() * d.cwiseSqrt().asDiagonal();
  std::vector<EllipsePoint> out;
  out.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double phi = 2.0 * numerics::kPi * static_cast<double>(i) / static_cast<double>(points);
    const Eigen::Vector2d v = Eigen::Vector2d(theta[0], theta[1]) +
                              std::sqrt(q) * root * Eigen::Vector2d(std::cos(phi), std::sin(phi));
    EllipsePoint pt{v(0), v(1), false};
    const double th[] = {v(0), v(1)};
    if (family != Family::beta_mixture && RocModel::valid_params(family, th)) {
      pt.concave = is_concave(RocModel::from_params(family, th));
    }
    out.push_back(pt);
  }
  return out;
}

std::vector<EllipsePoint> confidence_ellipse(std::span<const double> theta, const CovarianceEstimate& cov,
                                             double level, std::size_t points) {
  if (cov.sigma.rows() != 2) throw ValidationError("confidence ellipse needs a two-parameter model");
  return confidence_ellipse(cov.family, theta, Eigen::Matrix2d(cov.sampling_covariance()), level, points);
}

namespace {

double type7_quantile(std::vector<double>& v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace

ConfidenceBand confidence_band(const RocModel& model, const Eigen::MatrixXd& sampling_cov,
                               std::span<const double> grid, double level, std::size_t draws, std::uint64_t seed) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("band level must lie in (0,1)");
  if (draws < 2) throw ValidationError("band needs at least 2 draws");
  const auto k = static_cast<Eigen::Index>(model.dimension());
  if (k == 0 || sampling_cov.rows() != k || sampling_cov.cols() != k) {
    throw ValidationError("band covariance does not match the model");
  }
  for (double p : grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("band grid values must lie in [0,1]");
  }

  // Symmetric square root tolerates semidefinite covariances.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sampling_cov);
  const Eigen::MatrixXd root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const Eigen::Map<const Eigen::VectorXd> center(model.params().data(), k);

  std::vector<std::vector<double>> curves(draws);
  std::vector<char> accepted(draws, 0);
  kernels::run_indexed(draws, [&](std::size_t d) {
    numerics::RandomStream rng(seed, d);
    Eigen::VectorXd z(k);
    for (Eigen::Index i = 0; i < k; ++i) z(i) = rng.normal();
    const Eigen::VectorXd th = center + root * z;
    const std::vector<double> thv(th.data(), th.data() + k);
    if (!RocModel::valid_params(model.family(), thv)) return;
    const RocModel m = RocModel::from_params(model.family(), thv);
    curves[d].reserve(grid.size());
    for (double p : grid) curves[d].push_back(roc_eval(m, p));
    accepted[d] = 1;
  });

  ConfidenceBand band;
  band.level = level;
  band.draws = draws;
  band.seed = seed;
  band.rejected = static_cast<std::size_t>(std::count(accepted.begin(), accepted.end(), 0));
  if (2 * band.rejected > draws) {
    throw NumericalError("band: " + std::to_string(band.rejected) + " of " + std::to_string(draws) +
                         " draws fell outside the parameter domain; the estimate is too close to the boundary");
  }
  std::vector<double> column;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    column.clear();
    for (std::size_t d = 0; d < draws; ++d) {
      if (accepted[d]) column.push_back(curves[d][g]);
    }
    BandPoint pt;
    pt.p = grid[g];
    pt.fitted = roc_eval(model, grid[g]);
    pt.lower = type7_quantile(column, 0.5 * (1.0 - level));
    pt.upper = type7_quantile(column, 0.5 * (1.0 + level));
    band.points.push_back(pt);
  }
  return band;
}

ConfidenceBand confidence_band(const RocModel& model, const CovarianceEstimate& cov, std::span<const double> grid,
                               double level, std::size_t draws, std::uint64_t seed) {
  return confidence_band(model, cov.sampling_covariance(), grid, level, draws, seed);
}

double monte_carlo_p_value(double d_data, std::span<const double> replicates) {
  if (replicates.empty()) throw ValidationError("Monte Carlo p-value needs replicates");
  const auto at_least = std::count_if(replicates.begin(), replicates.end(), [&](double d) { return d_data <= d; });
  return static_cast<double>(at_least + 1) / static_cast<double>(replicates.size() + 1);
}

TestResult gof_test(const LabeledSample& sample, const FitConfig& config, std::size_t M, std::uint64_t seed) {
  sample.require_both_classes();
  if (M < 19) throw ValidationError("goodness-of-fit test needs M >= 19 replicates");
  config.validate();

  const EmpiricalRoc curve = empirical_roc(sample);
  const FitResult fit = fit_mde(curve, config);
  const RocModel model = fit.model();

  FitConfig replicate_config = config;
  replicate_config.extra_seeds.insert(replicate_config.extra_seeds.begin(), fit.theta);

  std::vector<double> distances(M);
  std::vector<char> redrawn(M, 0);
  std::vector<char> failed(M, 0);
  kernels::run_indexed(M, [&](std::size_t m) {
    numerics::RandomStream rng(seed, m);
    FitResult r = fit_mde(empirical_roc(sample_from_model(model, sample.n0(), sample.n1(), rng)), replicate_config);
    if (!r.converged) {
      redrawn[m] = 1;
      numerics::RandomStream again(seed, M + m);
      r = fit_mde(empirical_roc(sample_from_model(model, sample.n0(), sample.n1(), again)), replicate_config);
      if (!r.converged) failed[m] = 1;
    }
    distances[m] = r.distance;
  });

  TestResult out;
  out.statistic = fit.distance;
  out.null = NullDistribution::monte_carlo;
  out.seed = seed;
  out.replicates = std::move(distances);
  out.redraws = static_cast<std::size_t>(std::count(redrawn.begin(), redrawn.end(), 1));
  out.nonconverged = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  out.p_value = monte_carlo_p_value(fit.distance, out.replicates);
  if (!fit.converged) out.warnings.push_back("data fit did not converge");
  if (out.nonconverged > 0) {
    out.warnings.push_back(std::to_string(out.nonconverged) + " replicate fits did not converge after a redraw");
  }
  out.fit = fit;
  return out;
}

TestResult wald_test(std::span<const double> delta, const Eigen::MatrixXd& pooled) {
  const auto k = static_cast<Eigen::Index>(delta.size());
  if (k == 0 || pooled.rows() != k || pooled.cols() != k) throw ValidationError("wald_test: dimension mismatch");
  const Eigen::LLT<Eigen::MatrixXd> llt(pooled);
  if (llt.info() != Eigen::Success) throw ValidationError("wald_test: pooled covariance is not positive definite");
  const Eigen::Map<const Eigen::VectorXd> d(delta.data(), k);
  TestResult out;
  out.statistic = d.dot(llt.solve(d));
  out.null = NullDistribution::chi_square;
  out.dof = static_cast<int>(k);
  out.p_value = std::max(numerics::chi_square_sf(out.statistic, out.dof), DBL_MIN);
  return out;
}

TestResult z_test(double diff, double se) {
  if (!(se >= 0.0)) throw ValidationError("z_test: standard error must be nonnegative");
  TestResult out;
  out.null = NullDistribution::standard_normal;
  if (diff == 0.0) {
    out.statistic = 0.0;
  } else {
    if (se == 0.0) throw ValidationError("z_test: zero standard error with a nonzero difference");
    out.statistic = diff / se;
  }
  out.p_value = std::max(std::erfc(std::fabs(out.statistic) / std::sqrt(2.0)), DBL_MIN);
  return out;
}

TestResult curve_equality_test(const FitResult& a, const CovarianceEstimate& cov_a, const FitResult& b,
                               const CovarianceEstimate& cov_b) {
  if (a.family != b.family) throw ValidationError("curve equality test needs fits of the same family");
  if (a.constraint != b.constraint) throw ValidationError("curve equality test needs fits in the same constraint mode");
  std::vector<double> delta(a.theta.size());
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = a.theta[i] - b.theta[i];
  TestResult out = wald_test(delta, cov_a.sampling_covariance() + cov_b.sampling_covariance());
  for (const auto& w : cov_a.warnings) out.warnings.push_back("sample A: " + w);
  for (const auto& w : cov_b.warnings) out.warnings.push_back("sample B: " + w);
  return out;
}

TestResult auc_equality_test(const FitResult& a, const CovarianceEstimate& cov_a, const FitResult& b,
                             const CovarianceEstimate& cov_b) {
  const AucInference ia = auc_inference(a.model(), cov_a);
  const AucInference ib = auc_inference(b.model(), cov_b);
  TestResult out = z_test(ia.auc - ib.auc, std::hypot(ia.standard_error, ib.standard_error));
  for (const auto& w : cov_a.warnings) out.warnings.push_back("sample A: " + w);
  for (const auto& w : cov_b.warnings) out.warnings.push_back("sample B: " + w);
  return out;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

nlohmann::json to_json(const CovarianceEstimate& cov) {
  nlohmann::json j;
  j["family"] = std::string(family_name(cov.family));
  j["theta"] = cov.theta;
  j["A"] = matrix_json(cov.A);
  j["C"] = matrix_json(cov.C);
  j["sigma"] = matrix_json(cov.sigma);
  j["sampling_covariance"] = matrix_json(cov.sampling_covariance());
  j["lambda"] = cov.lambda;
  j["n0"] = cov.n0;
  j["n1"] = cov.n1;
  j["n"] = cov.n();
  j["quadrature"] = {{"nodes_2d", cov.nodes_2d}, {"nodes_1d", cov.nodes_1d}, {"rule", "gauss-legendre"}};
  j["warnings"] = cov.warnings;
  return j;
}

nlohmann::json to_json(const TestResult& test) {
  nlohmann::json j;
  j["statistic"] = test.statistic;
  switch (test.null) {
    case NullDistribution::chi_square: j["null"] = "chi-square"; j["dof"] = test.dof; break;
    case NullDistribution::standard_normal: j["null"] = "standard-normal"; break;
    case NullDistribution::monte_carlo:
      j["null"] = "monte-carlo";
      j["M"] = test.replicates.size();
      j["seed"] = test.seed;
      j["redraws"] = test.redraws;
      j["nonconverged"] = test.nonconverged;
      break;
  }
  j["p_value"] = test.p_value;
  if (test.fit) j["fit"] = to_json(*test.fit);
  j["warnings"] = test.warnings;
  return j;
}

}  // namespace rocfit
