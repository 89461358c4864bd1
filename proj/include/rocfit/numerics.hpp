#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rocfit::numerics {

inline constexpr double kPi = 3.14159265358979323846;

// Standard normal distribution.
double normal_cdf(double z);
double normal_pdf(double z);
/// Inverse of normal_cdf; u must lie in (0,1).
double normal_quantile(double u);

enum class NormalKind { cdf, quantile, pdf };
double std_normal(NormalKind kind, double z);

/// log Gamma(x) for x > 0, reentrant.
double log_gamma(double x);
double log_beta(double a, double b);

/// Beta(a,b) density at x in [0,1]; +inf at an endpoint where it diverges.
double beta_density(double a, double b, double x);

/// Regularized incomplete beta function I_x(a,b).
double reg_inc_beta(double a, double b, double x);

/// x with I_x(a,b) = u, for u in (0,1).
double beta_quantile(double a, double b, double u);

/// Upper tail of the chi-square distribution with integer dof >= 1.
double chi_square_sf(double x, int dof);
/// Chi-square quantile, 0 <= p < 1.
double chi_square_quantile(double p, int dof);

/// Open Gauss-Legendre rule on (0,1). Nodes strictly increasing, weights sum to one.
class QuadratureRule {
 public:
  static QuadratureRule gauss_legendre(std::size_t nodes);

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

 private:
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
      : nodes_(std::move(nodes)), weights_(std::move(weights)) {}

  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared immutable defaults: 256 nodes in 1D, 64 per axis in 2D.
const QuadratureRule& default_rule_1d();
const QuadratureRule& default_rule_2d();

/// Gauss-Legendre rule of the given size, cached per size.
const QuadratureRule& cached_gauss_legendre(std::size_t nodes);

/// Integral over (0,1). Throws NumericalError naming the node if f is not finite there.
double integrate(const std::function<double(double)>& f, const QuadratureRule& rule);
/// Tensor-product integral over (0,1)^2.
double integrate(const std::function<double(double, double)>& f, const QuadratureRule& rule);

/// Deterministic random substream identified by (seed, index).
///
/// The generator is xoshiro256** keyed through splitmix64, so the draw sequence
/// depends only on the pair and not on which thread consumes it.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0,1).
  double uniform();
  /// Standard normal by inversion.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t state_[4];
};

}  // namespace rocfit::numerics
