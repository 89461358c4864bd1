#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/rational.hpp>

namespace rocfit {

using Rational = boost::rational<std::int64_t>;

/// Marker values with binary outcomes. Labels are 0 or 1.
class LabeledSample {
 public:
  LabeledSample(std::vector<double> scores, std::vector<int> labels);

  std::size_t size() const { return scores_.size(); }
  const std::vector<double>& scores() const { return scores_; }
  const std::vector<int>& labels() const { return labels_; }
  std::size_t count(int label) const { return label == 0 ? n0_ : n1_; }
  std::size_t n0() const { return n0_; }
  std::size_t n1() const { return n1_; }

  /// Throws ValidationError naming the missing class.
  void require_both_classes() const;

 private:
  std::vector<double> scores_;
  std::vector<int> labels_;
  std::size_t n0_ = 0;
  std::size_t n1_ = 0;
};

/// One unique marker value x and the rates P(X > x | Y) as counts.
struct ThresholdRow {
  double value = 0.0;
  std::int64_t zeros = 0;      // class-0 observations equal to value
  std::int64_t ones = 0;       // class-1 observations equal to value
  std::int64_t far_count = 0;  // class-0 observations strictly above value
  std::int64_t hr_count = 0;   // class-1 observations strictly above value
};

struct ThresholdTable {
  std::vector<ThresholdRow> rows;  // ascending by value
  std::int64_t n0 = 0;
  std::int64_t n1 = 0;

  Rational far(std::size_t i) const { return Rational(rows[i].far_count, n0); }
  Rational hr(std::size_t i) const { return Rational(rows[i].hr_count, n1); }
};

/// Requires both classes.
ThresholdTable threshold_table(const LabeledSample& sample);

/// ROC vertex stored as counts: far = far_count / n0, hr = hr_count / n1.
struct RocVertex {
  std::int64_t far_count = 0;
  std::int64_t hr_count = 0;

  friend bool operator==(const RocVertex&, const RocVertex&) = default;
};

/// Linearly interpolated ROC curve from (0,0) to (1,1), nondecreasing in both coordinates.
class EmpiricalRoc {
 public:
  EmpiricalRoc(std::vector<RocVertex> vertices, std::int64_t n0, std::int64_t n1);

  std::int64_t n0() const { return n0_; }
  std::int64_t n1() const { return n1_; }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<RocVertex>& vertices() const { return vertices_; }

  double far(std::size_t i) const { return static_cast<double>(vertices_[i].far_count) / n0_; }
  double hr(std::size_t i) const { return static_cast<double>(vertices_[i].hr_count) / n1_; }
  Rational far_exact(std::size_t i) const { return Rational(vertices_[i].far_count, n0_); }
  Rational hr_exact(std::size_t i) const { return Rational(vertices_[i].hr_count, n1_); }

  friend bool operator==(const EmpiricalRoc&, const EmpiricalRoc&) = default;

 private:
  std::vector<RocVertex> vertices_;
  std::int64_t n0_;
  std::int64_t n1_;
};

EmpiricalRoc empirical_roc(const LabeledSample& sample);

/// Curve as a function of the false alarm rate; vertical segments report their upper end.
double eval_roc(const EmpiricalRoc& curve, double p);

/// Trapezoidal area, exact.
Rational empirical_auc_exact(const EmpiricalRoc& curve);
double empirical_auc(const EmpiricalRoc& curve);

/// Isotonic (pool-adjacent-violators) calibration over the unique marker values.
struct PavResult {
  std::vector<double> thresholds;        // unique marker values, ascending
  std::vector<Rational> values;          // calibrated event probability per threshold
  std::vector<std::size_t> block_start;  // first threshold index of each pooled block

  double value(std::size_t i) const { return boost::rational_cast<double>(values[i]); }
  std::size_t blocks() const { return block_start.size(); }
};

PavResult pav_calibrate(const LabeledSample& sample);

/// Replaces every score by its calibrated value.
LabeledSample recalibrate(const LabeledSample& sample, const PavResult& pav);

/// Least concave majorant of the vertex polyline, collinear vertices removed.
EmpiricalRoc concave_hull(const EmpiricalRoc& curve);

struct ConcavityDiagnostics {
  bool curve_concave = false;
  bool lr_nondecreasing = false;
  bool cep_nondecreasing = false;
};

ConcavityDiagnostics concavity_diagnostics(const LabeledSample& sample);

/// Class-1 CDF of the natural identification (class 0 standard uniform).
double natural_identification_cdf(const EmpiricalRoc& curve, double x);

}  // namespace rocfit
