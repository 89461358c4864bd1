#include "rocfit/numerics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <math.h>

#include "rocfit/error.hpp"

namespace rocfit::numerics {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Continued fraction for I_x(a,b), modified Lentz. Valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("reg_inc_beta: continued fraction did not converge");
}

// Power series in x; converges geometrically for x <= 1/2.
double beta_series(double a, double b, double x) {
  const double log_front = a * std::log(x) - log_beta(a, b);
  double term = 1.0;
  double sum = 1.0 / a;
  for (int n = 1; n < 2000; ++n) {
    term *= (n - b) * x / n;
    const double contrib = term / (a + n);
    sum += contrib;
    if (std::fabs(contrib) < 1e-17 * std::fabs(sum)) break;
  }
  return std::exp(log_front) * sum;
}

std::string describe_node(double s) {
  std::ostringstream os;
  os.precision(17);
  os << s;
  return os.str();
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Wichura's AS241 (PPND16), relative accuracy about 1e-16.
double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw ValidationError("normal_quantile: argument must lie in (0,1)");
  }
  const double q = u - 0.5;
  double r;
  double val;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    val = q *
          (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
               45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
            133.14166789178437745) * r + 3.387132872796366608) /
          (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
               21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
            42.313330701600911252) * r + 1.0);
    return val;
  }
  r = q < 0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double std_normal(NormalKind kind, double z) {
  switch (kind) {
    case NormalKind::cdf: return normal_cdf(z);
    case NormalKind::pdf: return normal_pdf(z);
    case NormalKind::quantile: return normal_quantile(z);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double beta_density(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x == 0.0) {
    if (a < 1.0) return std::numeric_limits<double>::infinity();
    return a == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
  }
  if (x == 1.0) {
    if (b < 1.0) return std::numeric_limits<double>::infinity();
    return b == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
  }
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("reg_inc_beta: shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("reg_inc_beta: x must lie in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  if (a < 1e-3 || b < 1e-3) {
    return x <= 0.5 ? beta_series(a, b, x) : 1.0 - beta_series(b, a, 1.0 - x);
  }
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double u) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("beta_quantile: shape parameters must be positive");
  if (!(u > 0.0 && u < 1.0)) throw ValidationError("beta_quantile: u must lie in (0,1)");
  if (a == 1.0 && b == 1.0) return u;

  // Newton steps safeguarded by bisection in logit space, so tails near 0 or 1 resolve in O(100) steps.
  auto logit = [](double v) { return std::log(v) - std::log1p(-v); };
  double lo = 0.0;
  double hi = 1.0;
  double x = a / (a + b);
  for (int iter = 0; iter < 400; ++iter) {
    const double f = reg_inc_beta(a, b, x) - u;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return x;

    const double dens = beta_density(a, b, x);
    double next = (std::isfinite(dens) && dens > 0.0) ? x - f / dens : -1.0;
    if (!(next > lo && next < hi)) {
      const double t_lo = lo > 0.0 ? logit(lo) : -745.0;
      const double t_hi = hi < 1.0 ? logit(hi) : 40.0;
      next = 1.0 / (1.0 + std::exp(-0.5 * (t_lo + t_hi)));
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    }
    if (next == x || next <= lo || next >= hi) return x;
    x = next;
  }
  return x;
}

double chi_square_sf(double x, int dof) {
  if (dof < 1) throw ValidationError("chi_square_sf: dof must be >= 1");
  if (x <= 0.0) return 1.0;
  const double half = 0.5 * x;
  if (dof % 2 == 0) {
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < dof / 2; ++j) {
      term *= half / j;
      sum += term;
    }
    return std::exp(-half) * sum;
  }
  double sum = std::erfc(std::sqrt(half));
  // term_j = e^{-x/2} (x/2)^{j-1/2} / Gamma(j+1/2)
  double term = std::exp(-half) * std::sqrt(half) / std::tgamma(1.5);
  for (int j = 1; j <= (dof - 1) / 2; ++j) {
    sum += term;
    term *= half / (j + 0.5);
  }
  return sum;
}

double chi_square_quantile(double p, int dof) {
  if (!(p >= 0.0 && p < 1.0)) throw ValidationError("chi_square_quantile: p must lie in [0,1)");
  if (p == 0.0) return 0.0;
  if (dof == 2) return -2.0 * std::log1p(-p);
  double lo = 0.0;
  double hi = 1.0;
  while (1.0 - chi_square_sf(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - chi_square_sf(mid, dof) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

QuadratureRule QuadratureRule::gauss_legendre(std::size_t n) {
  if (n == 0) throw ValidationError("gauss_legendre: need at least one node");
  std::vector<double> nodes(n);
  std::vector<double> weights(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z_prev = z;
      z = z_prev - p1 / dp;
      if (std::fabs(z - z_prev) <= 1e-16) break;
    }
    // Map [-1,1] -> (0,1); z near +1 gives the node nearest 0.
    const double w = 1.0 / ((1.0 - z * z) * dp * dp);
    nodes[i] = 0.5 * (1.0 - z);
    nodes[n - 1 - i] = 0.5 * (1.0 + z);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.5;
  return QuadratureRule(std::move(nodes), std::move(weights));
}

const QuadratureRule& cached_gauss_legendre(std::size_t nodes) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[nodes];
  if (!slot) slot = std::make_unique<QuadratureRule>(QuadratureRule::gauss_legendre(nodes));
  return *slot;
}

const QuadratureRule& default_rule_1d() {
  static const QuadratureRule& rule = cached_gauss_legendre(256);
  return rule;
}

const QuadratureRule& default_rule_2d() {
  static const QuadratureRule& rule = cached_gauss_legendre(64);
  return rule;
}

double integrate(const std::function<double(double)>& f, const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double s = rule.nodes()[i];
    const double v = f(s);
    if (!std::isfinite(v)) throw NumericalError("integrate: non-finite integrand at node " + describe_node(s));
    sum += rule.weights()[i] * v;
  }
  return sum;
}

double integrate(const std::function<double(double, double)>& f, const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double s = rule.nodes()[i];
    double row = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const double t = rule.nodes()[j];
      const double v = f(s, t);
      if (!std::isfinite(v)) {
        throw NumericalError("integrate: non-finite integrand at node (" + describe_node(s) + ", " +
                             describe_node(t) + ")");
      }
      row += rule.weights()[j] * v;
    }
    sum += rule.weights()[i] * row;
  }
  return sum;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {
  std::uint64_t mix = index;
  std::uint64_t key = seed ^ splitmix64(mix);
  for (auto& word : state_) word = splitmix64(key);
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_quantile(uniform()); }

}  // namespace rocfit::numerics
