#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rocfit/error.hpp"
#include "rocfit/fitting.hpp"
#include "rocfit/numerics.hpp"

namespace rocfit {

namespace {

constexpr std::size_t kSweepNodes = 4;
constexpr int kReanchorEvery = 128;
constexpr std::size_t kSquareRuleNodes = 96;
constexpr int kGradingLevels = 40;

struct Segment {
  double x0, x1, y0, y1;
};

std::vector<Segment> segments(const EmpiricalRoc& curve) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    if (curve.vertices()[i].far_count == curve.vertices()[i + 1].far_count) continue;
    out.push_back({curve.far(i), curve.far(i + 1), curve.hr(i), curve.hr(i + 1)});
  }
  return out;
}

// Splits [lo, hi] into dyadic panels shrinking toward each flagged end, where model curves may be singular.
std::vector<std::pair<double, double>> graded(double lo, double hi, bool toward_lo, bool toward_hi) {
  std::vector<std::pair<double, double>> out;
  if (!toward_lo && !toward_hi) {
    out.emplace_back(lo, hi);
    return out;
  }
  const double mid = toward_lo && toward_hi ? 0.5 * (lo + hi) : (toward_lo ? hi : lo);
  if (toward_lo) {
    const double w = mid - lo;
    for (int k = kGradingLevels; k >= 1; --k) {
      const double a = lo + w * std::ldexp(1.0, -k);
      if (a > lo) out.emplace_back(out.empty() ? lo : a, lo + w * std::ldexp(1.0, 1 - k));
    }
  }
  if (toward_hi) {
    const double w = hi - mid;
    for (int k = 1; k <= kGradingLevels; ++k) {
      const double b = hi - w * std::ldexp(1.0, -k);
      if (!(b < hi)) break;
      out.emplace_back(hi - w * std::ldexp(1.0, 1 - k), b);
    }
    out.back().second = hi;
  }
  return out;
}

// Antiderivatives of the beta core: H0(u) = int_0^u B, H1(u) = int_0^u v B(v) dv.
struct CoreIntegrals {
  double h0, h1;
};

CoreIntegrals core_integrals(double a, double b, double u, double cdf, double t) {
  const double ab = a + b;
  const double m2 = a * (a + 1.0) / (ab * (ab + 1.0));
  const double h0 = u * cdf - a * cdf / ab + t / ab;
  const double h1 = 0.5 * u * u * cdf - 0.5 * (m2 * cdf - t * (a + 1.0) / (ab * (ab + 1.0)) - u * t / (ab + 1.0));
  return {h0, h1};
}

}  // namespace

double l2_distance(const EmpiricalRoc& curve, const RocModel& model, std::size_t panel_nodes) {
  const auto& rule = numerics::cached_gauss_legendre(panel_nodes);
  double delta = 1.0;
  if (model.is_beta_family()) delta = model.shape().delta;

  double sum = 0.0;
  auto panel = [&](const Segment& seg, double lo, double hi) {
    const double w = hi - lo;
    const double slope = (seg.y1 - seg.y0) / (seg.x1 - seg.x0);
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double p = lo + w * rule.nodes()[k];
      const double e = seg.y0 + slope * (p - seg.x0);
      const double d = e - roc_eval(model, p);
      sum += w * rule.weights()[k] * d * d;
    }
  };
  auto graded_panel = [&](const Segment& seg, double lo, double hi) {
    const bool at_lo = lo == 0.0 || lo == delta;
    const bool at_hi = hi == 1.0 || hi == delta;
    for (const auto& [a, b] : graded(lo, hi, at_lo, at_hi)) panel(seg, a, b);
  };
  for (const Segment& seg : segments(curve)) {
    if (seg.x0 < delta && delta < seg.x1) {
      graded_panel(seg, seg.x0, delta);
      graded_panel(seg, delta, seg.x1);
    } else {
      graded_panel(seg, seg.x0, seg.x1);
    }
  }
  return std::sqrt(sum);
}

L2Objective::L2Objective(const EmpiricalRoc& curve, Family family) : family_(family) {
  if (family == Family::beta_mixture) throw ValidationError("L2Objective: mixtures are not fitted");
  const auto segs = segments(curve);
  panels_.reserve(segs.size());
  for (const Segment& s : segs) {
    const double w = s.x1 - s.x0;
    panels_.push_back({s.x0, s.x1, s.y0, (s.y1 - s.y0) / w});
    e2_ += w * (s.y0 * s.y0 + s.y0 * s.y1 + s.y1 * s.y1) / 3.0;
  }

  if (family == Family::binormal) {
    for (std::size_t j = 0; j < segs.size(); ++j) {
      const Segment& s = segs[j];
      const double w = s.x1 - s.x0;
      std::size_t nodes = 2;
      if (w > 1.0 / 64) nodes = 16;
      else if (w > 1.0 / 512) nodes = 8;
      else if (w > 1.0 / 4096) nodes = 4;
      const bool first = j == 0;
      const bool last = j + 1 == segs.size();
      if (first || last) nodes = 8;
      const auto& rule = numerics::cached_gauss_legendre(nodes);
      for (const auto& [lo, hi] : graded(s.x0, s.x1, first, last)) {
        for (std::size_t k = 0; k < rule.size(); ++k) {
          const double p = lo + (hi - lo) * rule.nodes()[k];
          if (!(p > 0.0 && p < 1.0)) continue;
          node_z_.push_back(numerics::normal_quantile(p));
          node_w_.push_back((hi - lo) * rule.weights()[k]);
          node_e_.push_back(s.y0 + (s.y1 - s.y0) * (p - s.x0) / w);
        }
      }
    }
    return;
  }

  bx_.push_back(0.0);
  for (const Segment& s : segs) bx_.push_back(s.x1);
  log_x_.resize(bx_.size());
  log_1mx_.resize(bx_.size());
  for (std::size_t j = 0; j < bx_.size(); ++j) {
    log_x_[j] = std::log(bx_[j]);
    log_1mx_[j] = std::log1p(-bx_[j]);
  }
  const auto& rule = numerics::cached_gauss_legendre(kSweepNodes);
  sweep_log_u_.resize(segs.size() * kSweepNodes);
  sweep_log_1mu_.resize(segs.size() * kSweepNodes);
  for (std::size_t j = 0; j < segs.size(); ++j) {
    for (std::size_t k = 0; k < kSweepNodes; ++k) {
      const double u = bx_[j] + (bx_[j + 1] - bx_[j]) * rule.nodes()[k];
      sweep_log_u_[j * kSweepNodes + k] = std::log(u);
      sweep_log_1mu_[j * kSweepNodes + k] = std::log1p(-u);
    }
  }
}

double L2Objective::squared(std::span<const double> theta) const {
  if (!RocModel::valid_params(family_, theta)) throw ValidationError("L2Objective: parameters outside the domain");
  if (family_ == Family::binormal) return squared_binormal(theta[0], theta[1]);
  return squared_beta(RocModel::from_params(family_, theta).shape());
}

double L2Objective::distance(std::span<const double> theta) const { return std::sqrt(squared(theta)); }

double L2Objective::squared_binormal(double mu, double sigma) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < node_z_.size(); ++i) {
    const double d = node_e_[i] - numerics::normal_cdf(mu + sigma * node_z_[i]);
    sum += node_w_[i] * d * d;
  }
  return sum;
}

double L2Objective::squared_beta(const BetaShape& s) const {
  const double a = s.alpha;
  const double b = s.beta;
  const double gamma = s.gamma;
  const double delta = s.delta;
  const double log_b = numerics::log_beta(a, b);
  const double spread_a = std::max(std::fabs(a - 1.0), 1.0);
  const double spread_b = std::max(std::fabs(b - 1.0), 1.0);
  const auto& rule = numerics::cached_gauss_legendre(kSweepNodes);

  // Curve antiderivatives G0 = int R, G1 = int p R at every breakpoint.
  const std::size_t m = bx_.size();
  const CoreIntegrals at_one = core_integrals(a, b, 1.0, 1.0, 0.0);
  const double g0_delta = gamma * delta + (1.0 - gamma) * delta * at_one.h0;
  const double g1_delta = 0.5 * gamma * delta * delta + (1.0 - gamma) * delta * delta * at_one.h1;

  double cross = 0.0;
  double prev_g0 = 0.0;
  double prev_g1 = 0.0;
  double cdf = 0.0;
  int since_anchor = 0;
  for (std::size_t j = 1; j < m; ++j) {
    const double x = bx_[j];
    double g0;
    double g1;
    if (x >= delta) {
      g0 = g0_delta + (x - delta);
      g1 = g1_delta + 0.5 * (x * x - delta * delta);
    } else {
      double u;
      double t;
      if (delta == 1.0) {
        u = x;
        const double x_prev = bx_[j - 1];
        const double w = x - x_prev;
        const bool smooth = since_anchor < kReanchorEvery && w * spread_a <= 0.05 * x_prev &&
                            w * spread_b <= 0.05 * (1.0 - x);
        if (smooth) {
          double inc = 0.0;
          const std::size_t base = (j - 1) * kSweepNodes;
          for (std::size_t k = 0; k < kSweepNodes; ++k) {
            inc += rule.weights()[k] *
                   std::exp((a - 1.0) * sweep_log_u_[base + k] + (b - 1.0) * sweep_log_1mu_[base + k] - log_b);
          }
          cdf = std::min(1.0, cdf + w * inc);
          ++since_anchor;
        } else {
          cdf = numerics::reg_inc_beta(a, b, x);
          since_anchor = 0;
        }
        t = std::exp(a * log_x_[j] + b * log_1mx_[j] - log_b);
      } else {
        u = x / delta;
        cdf = numerics::reg_inc_beta(a, b, u);
        t = std::exp(a * std::log(u) + b * std::log1p(-u) - log_b);
      }
      const CoreIntegrals h = core_integrals(a, b, u, cdf, t);
      g0 = gamma * x + (1.0 - gamma) * delta * h.h0;
      g1 = 0.5 * gamma * x * x + (1.0 - gamma) * delta * delta * h.h1;
    }
    const Panel& p = panels_[j - 1];
    const double d0 = g0 - prev_g0;
    cross += p.y0 * d0 + p.slope * ((g1 - prev_g1) - p.x0 * d0);
    prev_g0 = g0;
    prev_g1 = g1;
  }

  // int_0^1 B^2 on a smootherstep-substituted rule that flattens the endpoints.
  const auto& sq = numerics::cached_gauss_legendre(kSquareRuleNodes);
  double j2 = 0.0;
  for (std::size_t k = 0; k < sq.size(); ++k) {
    const double v = sq.nodes()[k];
    const double p = v * v * v * (10.0 - 15.0 * v + 6.0 * v * v);
    const double dp = 30.0 * v * v * (1.0 - v) * (1.0 - v);
    const double c = numerics::reg_inc_beta(a, b, p);
    j2 += sq.weights()[k] * dp * c * c;
  }
  const double r2 =
      delta * (gamma * gamma + 2.0 * gamma * (1.0 - gamma) * b / (a + b) + (1.0 - gamma) * (1.0 - gamma) * j2) +
      (1.0 - delta);

  return std::max(0.0, e2_ - 2.0 * cross + r2);
}

}  // namespace rocfit
