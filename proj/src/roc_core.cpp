#include "rocfit/roc_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rocfit/error.hpp"

namespace rocfit {

LabeledSample::LabeledSample(std::vector<double> scores, std::vector<int> labels)
    : scores_(std::move(scores)), labels_(std::move(labels)) {
  if (scores_.empty()) throw ValidationError("sample is empty");
  if (scores_.size() != labels_.size()) {
    throw ValidationError("scores and labels differ in length (" + std::to_string(scores_.size()) + " vs " +
                          std::to_string(labels_.size()) + ")");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0 && labels_[i] != 1) {
      throw ValidationError("label at position " + std::to_string(i) + " is not 0 or 1");
    }
    if (!std::isfinite(scores_[i])) throw ValidationError("score at position " + std::to_string(i) + " is not finite");
    (labels_[i] == 0 ? n0_ : n1_) += 1;
  }
}

void LabeledSample::require_both_classes() const {
  if (n0_ == 0) throw ValidationError("sample has no class-0 observations (label 0 missing)");
  if (n1_ == 0) throw ValidationError("sample has no class-1 observations (label 1 missing)");
}

ThresholdTable threshold_table(const LabeledSample& sample) {
  sample.require_both_classes();
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& scores = sample.scores();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  ThresholdTable table;
  table.n0 = static_cast<std::int64_t>(sample.n0());
  table.n1 = static_cast<std::int64_t>(sample.n1());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = scores[order[k]];
    if (table.rows.empty() || table.rows.back().value != v) table.rows.push_back(ThresholdRow{v});
    (sample.labels()[order[k]] == 0 ? table.rows.back().zeros : table.rows.back().ones) += 1;
  }
  std::int64_t above0 = 0;
  std::int64_t above1 = 0;
  for (auto it = table.rows.rbegin(); it != table.rows.rend(); ++it) {
    it->far_count = above0;
    it->hr_count = above1;
    above0 += it->zeros;
    above1 += it->ones;
  }
  return table;
}

EmpiricalRoc::EmpiricalRoc(std::vector<RocVertex> vertices, std::int64_t n0, std::int64_t n1)
    : vertices_(std::move(vertices)), n0_(n0), n1_(n1) {
  if (n0_ < 1 || n1_ < 1) throw ValidationError("ROC curve needs both classes");
  if (vertices_.size() < 2) throw ValidationError("ROC curve needs at least two vertices");
  if (vertices_.front() != RocVertex{0, 0}) throw ValidationError("ROC curve must start at (0,0)");
  if (vertices_.back() != RocVertex{n0_, n1_}) throw ValidationError("ROC curve must end at (1,1)");
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    if (vertices_[i].far_count < vertices_[i - 1].far_count || vertices_[i].hr_count < vertices_[i - 1].hr_count) {
      throw ValidationError("ROC vertices must be nondecreasing");
    }
  }
}

EmpiricalRoc empirical_roc(const LabeledSample& sample) {
  const ThresholdTable table = threshold_table(sample);
  std::vector<RocVertex> vertices;
  vertices.reserve(table.rows.size() + 2);
  vertices.push_back({0, 0});
  for (auto it = table.rows.rbegin(); it != table.rows.rend(); ++it) {
    const RocVertex v{it->far_count, it->hr_count};
    if (v != vertices.back()) vertices.push_back(v);
  }
  if (vertices.back() != RocVertex{table.n0, table.n1}) vertices.push_back({table.n0, table.n1});
  return EmpiricalRoc(std::move(vertices), table.n0, table.n1);
}

double eval_roc(const EmpiricalRoc& curve, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("eval_roc: p must lie in [0,1]");
  const auto& v = curve.vertices();
  const double n0 = static_cast<double>(curve.n0());
  // Last vertex with far <= p; among equal far values it has the largest hr.
  auto it = std::upper_bound(v.begin(), v.end(), p, [&](double value, const RocVertex& x) {
    return value < static_cast<double>(x.far_count) / n0;
  });
  const std::size_t j = static_cast<std::size_t>(std::distance(v.begin(), it)) - 1;
  const double far_j = curve.far(j);
  if (far_j == p || j + 1 == v.size()) return curve.hr(j);
  const double far_k = curve.far(j + 1);
  const double t = (p - far_j) / (far_k - far_j);
  return curve.hr(j) + t * (curve.hr(j + 1) - curve.hr(j));
}

Rational empirical_auc_exact(const EmpiricalRoc& curve) {
  const auto& v = curve.vertices();
  std::int64_t twice_area = 0;  // in units of 1/(n0 n1)
  for (std::size_t i = 1; i < v.size(); ++i) {
    twice_area += (v[i].far_count - v[i - 1].far_count) * (v[i].hr_count + v[i - 1].hr_count);
  }
  return Rational(twice_area, 2 * curve.n0() * curve.n1());
}

double empirical_auc(const EmpiricalRoc& curve) { return boost::rational_cast<double>(empirical_auc_exact(curve)); }

PavResult pav_calibrate(const LabeledSample& sample) {
  // Unique thresholds with per-value counts; single-class samples are allowed here.
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& scores = sample.scores();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  struct Block {
    std::int64_t ones;
    std::int64_t size;
    std::size_t first;
  };
  PavResult result;
  std::vector<Block> blocks;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = scores[order[k]];
    const int y = sample.labels()[order[k]];
    if (result.thresholds.empty() || result.thresholds.back() != v) {
      result.thresholds.push_back(v);
      blocks.push_back({0, 0, result.thresholds.size() - 1});
    }
    blocks.back().ones += y;
    blocks.back().size += 1;
  }

  // Pool while the new block's mean does not exceed its predecessor's, so level sets form one block.
  std::vector<Block> stack;
  for (const Block& b : blocks) {
    stack.push_back(b);
    while (stack.size() > 1) {
      const Block& top = stack.back();
      const Block& prev = stack[stack.size() - 2];
      if (prev.ones * top.size < top.ones * prev.size) break;
      Block merged{prev.ones + top.ones, prev.size + top.size, prev.first};
      stack.pop_back();
      stack.back() = merged;
    }
  }

  result.values.resize(result.thresholds.size());
  for (std::size_t b = 0; b < stack.size(); ++b) {
    const std::size_t end = b + 1 < stack.size() ? stack[b + 1].first : result.thresholds.size();
    result.block_start.push_back(stack[b].first);
    for (std::size_t i = stack[b].first; i < end; ++i) result.values[i] = Rational(stack[b].ones, stack[b].size);
  }
  return result;
}

LabeledSample recalibrate(const LabeledSample& sample, const PavResult& pav) {
  std::vector<double> rescored(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    auto it = std::lower_bound(pav.thresholds.begin(), pav.thresholds.end(), sample.scores()[i]);
    if (it == pav.thresholds.end() || *it != sample.scores()[i]) {
      throw ValidationError("recalibrate: score not covered by the calibration");
    }
    rescored[i] = pav.value(static_cast<std::size_t>(it - pav.thresholds.begin()));
  }
  return LabeledSample(std::move(rescored), sample.labels());
}

namespace {

// Cross product of (b - a) and (c - b) in count units. Positive means a left turn.
__int128 turn(const RocVertex& a, const RocVertex& b, const RocVertex& c) {
  const __int128 dx1 = b.far_count - a.far_count;
  const __int128 dy1 = b.hr_count - a.hr_count;
  const __int128 dx2 = c.far_count - b.far_count;
  const __int128 dy2 = c.hr_count - b.hr_count;
  return dx1 * dy2 - dy1 * dx2;
}

}  // namespace

EmpiricalRoc concave_hull(const EmpiricalRoc& curve) {
  // Axis scaling by 1/n0, 1/n1 preserves turn signs, so work in counts.
  std::vector<RocVertex> hull;
  for (const RocVertex& v : curve.vertices()) {
    while (hull.size() >= 2 && turn(hull[hull.size() - 2], hull.back(), v) >= 0) hull.pop_back();
    hull.push_back(v);
  }
  return EmpiricalRoc(std::move(hull), curve.n0(), curve.n1());
}

ConcavityDiagnostics concavity_diagnostics(const LabeledSample& sample) {
  const ThresholdTable table = threshold_table(sample);
  ConcavityDiagnostics out{true, true, true};

  // (a) geometry: no left turn anywhere along the polyline, walked from (0,0).
  const EmpiricalRoc curve = empirical_roc(sample);
  const auto& v = curve.vertices();
  for (std::size_t i = 2; i < v.size(); ++i) {
    if (turn(v[i - 2], v[i - 1], v[i]) > 0) {
      out.curve_concave = false;
      break;
    }
  }

  // (b) discrete likelihood ratio, infinite where the class-0 mass vanishes.
  // LR_i <= LR_{i+1}  <=>  ones_i * zeros_{i+1} <= ones_{i+1} * zeros_i  (n0, n1 cancel).
  const auto& rows = table.rows;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const bool inf_i = rows[i].zeros == 0;
    const bool inf_next = rows[i + 1].zeros == 0;
    bool ok;
    if (inf_next) ok = true;
    else if (inf_i) ok = false;
    else ok = rows[i].ones * rows[i + 1].zeros <= rows[i + 1].ones * rows[i].zeros;
    if (!ok) {
      out.lr_nondecreasing = false;
      break;
    }
  }

  // (c) conditional event probability ones / (zeros + ones).
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const Rational cep_i(rows[i].ones, rows[i].ones + rows[i].zeros);
    const Rational cep_next(rows[i + 1].ones, rows[i + 1].ones + rows[i + 1].zeros);
    if (cep_next < cep_i) {
      out.cep_nondecreasing = false;
      break;
    }
  }
  return out;
}

double natural_identification_cdf(const EmpiricalRoc& curve, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // R_+(q): lowest hr among curve points with far >= q.
  const double q = 1.0 - x;
  const auto& v = curve.vertices();
  const double n0 = static_cast<double>(curve.n0());
  auto it = std::lower_bound(v.begin(), v.end(), q, [&](const RocVertex& a, double value) {
    return static_cast<double>(a.far_count) / n0 < value;
  });
  const std::size_t j = static_cast<std::size_t>(std::distance(v.begin(), it));
  double r_plus;
  if (curve.far(j) == q) {
    r_plus = curve.hr(j);
  } else {
    const double t = (q - curve.far(j - 1)) / (curve.far(j) - curve.far(j - 1));
    r_plus = curve.hr(j - 1) + t * (curve.hr(j) - curve.hr(j - 1));
  }
  return 1.0 - r_plus;
}

}  // namespace rocfit
