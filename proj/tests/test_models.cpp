#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rocfit/error.hpp"
#include "rocfit/models.hpp"
#include "rocfit/numerics.hpp"

using namespace rocfit;
namespace nm = rocfit::numerics;

namespace {

double quadrature_auc(const RocModel& m) {
  // Panels graded geometrically toward both ends of [0, delta] absorb endpoint singularities; the curve is 1 beyond delta.
  const double delta = m.family() == Family::binormal ? 1.0 : m.shape().delta;
  std::vector<double> cuts = {0.0};
  for (int k = 60; k >= 1; --k) cuts.push_back(delta * std::ldexp(1.0, -k));
  for (int k = 2; k <= 50; ++k) cuts.push_back(delta * (1.0 - std::ldexp(1.0, -k)));
  cuts.push_back(delta);
  const auto& rule = nm::cached_gauss_legendre(32);
  double sum = 1.0 - delta;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    for (std::size_t i = 0; i < rule.size(); ++i) sum += (b - a) * rule.weights()[i] * roc_eval(m, a + (b - a) * rule.nodes()[i]);
  }
  return sum;
}

bool chord_concave(const RocModel& m) {
  const int n = 1000;
  double prev = roc_eval(m, 0.0);
  double prev_slope = HUGE_VAL;
  for (int i = 1; i <= n; ++i) {
    const double y = roc_eval(m, static_cast<double>(i) / n);
    const double slope = (y - prev) * n;
    if (slope > prev_slope + 1e-9) return false;
    prev_slope = slope;
    prev = y;
  }
  return true;
}

}  // namespace

TEST(RocModel, DomainChecks) {
  EXPECT_THROW(RocModel::binormal(-0.1, 1.0), ValidationError);
  EXPECT_THROW(RocModel::binormal(1.0, 0.0), ValidationError);
  EXPECT_THROW(RocModel::beta2(0.0, 1.0), ValidationError);
  EXPECT_THROW(RocModel::beta3_gamma(1.0, 1.0, 1.5), ValidationError);
  EXPECT_THROW(RocModel::beta3_delta(1.0, 1.0, 0.0), ValidationError);
  EXPECT_THROW(RocModel::mixture({0.5, 0.4}, {{1, 1}, {2, 2}}), ValidationError);
  EXPECT_NO_THROW(RocModel::beta4(0.5, 2.0, 0.0, 1.0));
  const double p[] = {1.0};
  EXPECT_FALSE(RocModel::valid_params(Family::beta2, p));
}

TEST(RocModel, FamilyNames) {
  EXPECT_EQ(parse_family("beta"), Family::beta2);
  EXPECT_EQ(parse_family("beta3g"), Family::beta3_gamma);
  EXPECT_EQ(parse_family("beta3d"), Family::beta3_delta);
  EXPECT_EQ(parse_family("binormal"), Family::binormal);
  for (Family f : {Family::binormal, Family::beta2, Family::beta3_gamma, Family::beta3_delta, Family::beta4,
                   Family::beta_mixture})
    EXPECT_EQ(parse_family(family_name(f)), f);
  EXPECT_THROW(parse_family("gamma"), ValidationError);
  EXPECT_EQ(family_dimension(Family::beta4), 4u);
}

TEST(RocEval, ClosedFormValues) {
  const auto id = RocModel::beta2(1, 1);
  for (double p : {0.0, 0.1, 0.5, 0.93, 1.0}) EXPECT_NEAR(roc_eval(id, p), p, 1e-15);
  EXPECT_NEAR(roc_eval(RocModel::beta2(2, 2), 0.25), 0.15625, 1e-14);
  EXPECT_NEAR(roc_eval(RocModel::binormal(1.13, 1.22), 0.5), nm::normal_cdf(1.13), 1e-14);
  EXPECT_NEAR(roc_eval(RocModel::binormal(1.13, 1.22), 0.5), 0.8708, 1e-4);
  EXPECT_EQ(roc_eval(RocModel::binormal(1.0, 2.0), 0.0), 0.0);
  EXPECT_EQ(roc_eval(RocModel::binormal(1.0, 2.0), 1.0), 1.0);
}

TEST(RocEval, StraightEdges) {
  const auto g = RocModel::beta3_gamma(2.0, 2.0, 0.3);
  EXPECT_EQ(roc_eval(g, 0.0), 0.0);
  EXPECT_NEAR(roc_eval(g, 1e-12), 0.3, 1e-9);
  EXPECT_NEAR(roc_eval(g, 0.25), 0.3 + 0.7 * 0.15625, 1e-14);
  const auto d = RocModel::beta3_delta(2.0, 2.0, 0.5);
  EXPECT_NEAR(roc_eval(d, 0.125), 0.15625, 1e-14);
  EXPECT_EQ(roc_eval(d, 0.5), 1.0);
  EXPECT_EQ(roc_eval(d, 0.7), 1.0);
  const auto b4 = RocModel::beta4(2.0, 2.0, 0.0, 1.0);
  EXPECT_NEAR(roc_eval(b4, 0.25), 0.15625, 1e-14);
}

TEST(RocEval, NondecreasingOntoUnitInterval) {
  const std::vector<RocModel> models = {RocModel::binormal(0.7, 1.6), RocModel::beta2(0.3, 4.0),
                                        RocModel::beta4(0.5, 2.0, 0.2, 0.8),
                                        RocModel::mixture({0.3, 0.7}, {{0.5, 3.0}, {2.0, 2.0}})};
  for (const auto& m : models) {
    double prev = roc_eval(m, 0.0);
    EXPECT_GE(prev, 0.0);
    for (int i = 1; i <= 1000; ++i) {
      const double v = roc_eval(m, i / 1000.0);
      EXPECT_GE(v, prev);
      prev = v;
    }
    EXPECT_EQ(prev, 1.0);
  }
}

TEST(RocSlope, ClosedFormsAndFiniteDifferences) {
  EXPECT_NEAR(roc_slope(RocModel::beta2(1, 1), 0.3), 1.0, 1e-14);
  EXPECT_NEAR(roc_slope(RocModel::beta2(2, 2), 0.5), 1.5, 1e-14);
  EXPECT_NEAR(roc_slope(RocModel::binormal(0, 1), 0.77), 1.0, 1e-12);
  EXPECT_THROW(roc_slope(RocModel::beta2(2, 2), 0.0), ValidationError);
  const std::vector<RocModel> models = {RocModel::binormal(1.2, 0.7), RocModel::beta2(1.4, 2.5),
                                        RocModel::beta3_gamma(0.8, 1.9, 0.1),
                                        RocModel::mixture({0.5, 0.5}, {{1.5, 3.0}, {2.0, 2.0}})};
  const double h = 1e-6;
  for (const auto& m : models) {
    for (double p = 0.05; p < 0.96; p += 0.05) {
      const double fd = (roc_eval(m, p + h) - roc_eval(m, p - h)) / (2 * h);
      EXPECT_NEAR(roc_slope(m, p), fd, 1e-6 * std::max(1.0, std::fabs(fd))) << family_name(m.family()) << " " << p;
    }
  }
}

TEST(ModelAuc, ClosedFormValues) {
  EXPECT_NEAR(model_auc(RocModel::beta2(0.79, 2.57)), 2.57 / 3.36, 1e-14);
  EXPECT_NEAR(model_auc(RocModel::beta2(0.79, 2.57)), 0.7649, 1e-4);
  EXPECT_NEAR(model_auc(RocModel::binormal(0.0, 2.3)), 0.5, 1e-15);
  EXPECT_NEAR(model_auc(RocModel::binormal(1.05, 0.78)), 0.7961, 1e-4);
  const auto mix = RocModel::mixture({0.25, 0.75}, {{1, 1}, {1, 3}});
  EXPECT_NEAR(model_auc(mix), 0.25 * 0.5 + 0.75 * 0.75, 1e-14);
}

TEST(ModelAuc, AgreesWithQuadratureOnRandomDraws) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> mu(0.0, 3.0), log_s(std::log(0.3), std::log(3.0)),
      log_ab(std::log(0.2), std::log(8.0)), unit(0.02, 0.98);
  for (int i = 0; i < 100; ++i) {
    const auto b = RocModel::binormal(mu(gen), std::exp(log_s(gen)));
    EXPECT_NEAR(model_auc(b), quadrature_auc(b), 1e-8);
    const auto be = RocModel::beta2(std::exp(log_ab(gen)), std::exp(log_ab(gen)));
    EXPECT_NEAR(model_auc(be), quadrature_auc(be), 1e-8);
    const auto b4 = RocModel::beta4(std::exp(log_ab(gen)), std::exp(log_ab(gen)), unit(gen) * 0.5, unit(gen));
    EXPECT_NEAR(model_auc(b4), quadrature_auc(b4), 1e-8);
  }
}

TEST(AucDescriptor, TableBoundaries) {
  EXPECT_EQ(auc_descriptor(0.70), "moderate");
  EXPECT_EQ(auc_descriptor(0.50), "abysmal");
  EXPECT_EQ(auc_descriptor(0.995), "nearly perfect");
  EXPECT_EQ(auc_descriptor(0.99), "very strong");
  EXPECT_EQ(auc_descriptor(0.95), "strong");
  EXPECT_EQ(auc_descriptor(0.85), "substantial");
  EXPECT_EQ(auc_descriptor(0.75), "moderate");
  EXPECT_EQ(auc_descriptor(0.65), "weak");
  EXPECT_EQ(auc_descriptor(0.5000001), "weak");
}

TEST(IsConcave, ReferenceFits) {
  EXPECT_FALSE(is_concave(RocModel::beta2(0.34, 1.32)));
  EXPECT_TRUE(is_concave(RocModel::beta2(0.79, 2.57)));
  EXPECT_TRUE(is_concave(RocModel::beta2(0.38, 1.62)));
  EXPECT_TRUE(is_concave(RocModel::binormal(0.8, 1.0)));
  EXPECT_FALSE(is_concave(RocModel::binormal(0.8, 1.1)));
  EXPECT_TRUE(is_concave(RocModel::beta4(0.5, 1.6, 0.2, 0.9)));
  EXPECT_FALSE(is_concave(RocModel::mixture({0.5, 0.5}, {{1, 1}, {2, 2}})));
}

TEST(IsConcave, AgreesWithChordTestOutsideTheWedge) {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> a(0.3, 1.8), b(0.3, 4.0);
  int tested = 0, concave = 0;
  while (tested < 200) {
    const double alpha = a(gen);
    const double beta = b(gen);
    if (std::fabs(beta - (2.0 - alpha)) < 0.02 || std::fabs(alpha - 1.0) < 0.02) continue;
    if (alpha <= 1.0 && beta >= 1.0 && beta < 2.0 - alpha) continue;
    const auto m = RocModel::beta2(alpha, beta);
    EXPECT_EQ(is_concave(m), chord_concave(m)) << alpha << " " << beta;
    concave += is_concave(m);
    ++tested;
  }
  EXPECT_GT(concave, 20);
}

TEST(IsConcave, WedgeIsGeometricallyConcaveButExcluded) {
  // alpha <= 1, 1 <= beta < 2 - alpha: the density is nonincreasing, yet the predicate says no.
  for (const auto& ab : {std::pair{0.34, 1.32}, std::pair{0.5, 1.2}, std::pair{0.9, 1.05}}) {
    const auto m = RocModel::beta2(ab.first, ab.second);
    EXPECT_FALSE(is_concave(m));
    EXPECT_TRUE(chord_concave(m));
  }
}

TEST(Sampling, InverseTransforms) {
  EXPECT_NEAR(class1_inverse_transform(RocModel::beta2(1, 1), 0.3), 0.3, 1e-12);
  EXPECT_NEAR(class1_inverse_transform(RocModel::beta2(2, 2), 0.84375), 0.75, 1e-10);
  EXPECT_NEAR(class1_inverse_transform(RocModel::binormal(1, 1), 0.5), 1.0, 1e-12);
  EXPECT_NEAR(class0_inverse_transform(RocModel::beta2(2, 2), 0.4), 0.4, 1e-15);
  EXPECT_NEAR(class0_inverse_transform(RocModel::binormal(1, 1), 0.5), 0.0, 1e-12);
  // gamma atom at x = 1
  EXPECT_EQ(class1_inverse_transform(RocModel::beta3_gamma(2, 2, 0.3), 0.8), 1.0);
  // delta edge: class-1 support is [1 - delta, 1]
  EXPECT_GE(class1_inverse_transform(RocModel::beta3_delta(2, 2, 0.4), 0.01), 0.6);
}

TEST(Sampling, EmpiricalCurveTracksModel) {
  const std::vector<RocModel> models = {RocModel::binormal(1.0, 1.2), RocModel::beta2(0.8, 2.5),
                                        RocModel::beta4(0.7, 1.3, 0.24, 0.9)};
  std::uint64_t index = 0;
  for (const auto& m : models) {
    nm::RandomStream rng(42, index++);
    const LabeledSample s = sample_from_model(m, 100000, 100000, rng);
    EXPECT_EQ(s.n0(), 100000u);
    EXPECT_EQ(s.n1(), 100000u);
    const EmpiricalRoc c = empirical_roc(s);
    // p = 0 is skipped: the model is 0 there by convention while the empirical curve starts at its atom.
    double sup = 0.0;
    for (int i = 1; i <= 1000; ++i) sup = std::max(sup, std::fabs(eval_roc(c, i / 1000.0) - roc_eval(m, i / 1000.0)));
    EXPECT_LT(sup, 0.01) << family_name(m.family());
    EXPECT_NEAR(empirical_auc(c), model_auc(m), 0.005);
  }
}

TEST(ParamGradient, BinormalClosedForm) {
  const auto g = param_gradient(RocModel::binormal(0, 1), 0.5);
  EXPECT_NEAR(g.partials[0], 0.3989422804014327, 1e-14);
  EXPECT_NEAR(g.partials[1], 0.0, 1e-15);
  EXPECT_FALSE(g.one_sided);
  const double h = 1e-6;
  for (double mu : {0.0, 0.5, 1.3, 2.5}) {
    for (double sigma : {0.4, 1.0, 1.7}) {
      for (double p = 0.02; p < 0.99; p += 0.08) {
        const auto gr = param_gradient(RocModel::binormal(mu, sigma), p);
        const double mu_lo = std::max(0.0, mu - h);
        const double dmu = (roc_eval(RocModel::binormal(mu + h, sigma), p) - roc_eval(RocModel::binormal(mu_lo, sigma), p)) /
                           (mu + h - mu_lo);
        const double dsig =
            (roc_eval(RocModel::binormal(mu, sigma + h), p) - roc_eval(RocModel::binormal(mu, sigma - h), p)) / (2 * h);
        EXPECT_NEAR(gr.partials[0], dmu, 1e-6);
        EXPECT_NEAR(gr.partials[1], dsig, 1e-6);
      }
    }
  }
}

TEST(ParamGradient, BetaFiniteDifferences) {
  const auto g = param_gradient(RocModel::beta2(1, 1), 0.5);
  EXPECT_NEAR(g.partials[1], -0.5 * std::log(0.5), 1e-6);
  // d/dalpha of I_p(alpha, 1) = p^alpha is p^alpha ln p
  const auto ga = param_gradient(RocModel::beta2(2, 1), 0.3);
  EXPECT_NEAR(ga.partials[0], 0.09 * std::log(0.3), 1e-6);
  const auto edge = param_gradient(RocModel::beta3_gamma(2, 2, 0.0), 0.3);
  EXPECT_TRUE(edge.one_sided);
  EXPECT_EQ(edge.partials.size(), 3u);
  EXPECT_NEAR(edge.partials[2], 1.0 - roc_eval(RocModel::beta2(2, 2), 0.3), 1e-6);
}

TEST(Bernstein, IdentityIsExact) {
  for (int n : {0, 1, 10, 40}) {
    const RocModel m = bernstein_mixture([](double) { return 1.0; }, n);
    EXPECT_EQ(m.family(), Family::beta_mixture);
    EXPECT_EQ(m.components().size(), static_cast<std::size_t>(n + 1));
    for (double w : m.weights()) EXPECT_NEAR(w, 1.0 / (n + 1), 1e-15);
    for (int i = 0; i <= 1000; ++i) EXPECT_NEAR(roc_eval(m, i / 1000.0), i / 1000.0, 1e-12);
  }
}

namespace {

double bernstein_sup_error(const RocModel& target, int n) {
  const RocModel m = bernstein_mixture([&](double q) { return roc_slope(target, std::clamp(1.0 - q, 1e-15, 1 - 1e-15)); }, n);
  double sup = 0.0;
  for (int i = 1; i <= 1000; ++i) sup = std::max(sup, std::fabs(roc_eval(m, i / 1000.0) - roc_eval(target, i / 1000.0)));
  return sup;
}

}  // namespace

TEST(Bernstein, ReproducesQuadraticSlopeExactly) {
  // B_n maps 6q(1-q) to (1 - 1/n) 6q(1-q), and normalisation removes the factor.
  for (int n : {2, 10, 50}) EXPECT_LT(bernstein_sup_error(RocModel::beta2(2, 2), n), 1e-13) << n;
}

TEST(Bernstein, ConvergesToBetaTarget) {
  const auto target = RocModel::beta2(3, 5);
  const double e10 = bernstein_sup_error(target, 10);
  const double e50 = bernstein_sup_error(target, 50);
  const double e200 = bernstein_sup_error(target, 200);
  EXPECT_LT(e50, e10);
  EXPECT_LT(e200, e50);
  EXPECT_LT(e50, 0.05);
}

TEST(Bernstein, RejectsNonFiniteSlope) {
  EXPECT_THROW(bernstein_mixture([](double q) { return q < 0.5 ? 1.0 : std::nan(""); }, 4), ValidationError);
  EXPECT_THROW(bernstein_mixture([](double) { return 1.0; }, -1), ValidationError);
}

TEST(ModelJson, RoundTrip) {
  const std::vector<RocModel> models = {RocModel::binormal(1.13, 1.22), RocModel::beta3_delta(0.4, 2.0, 0.8),
                                        RocModel::mixture({0.2, 0.8}, {{0.5, 3.0}, {2.0, 2.5}})};
  for (const auto& m : models) {
    const RocModel back = model_from_json(to_json(m));
    EXPECT_EQ(back.family(), m.family());
    EXPECT_EQ(std::vector<double>(back.params().begin(), back.params().end()),
              std::vector<double>(m.params().begin(), m.params().end()));
    EXPECT_EQ(back.weights(), m.weights());
    EXPECT_EQ(roc_eval(back, 0.37), roc_eval(m, 0.37));
  }
  EXPECT_THROW(model_from_json(nlohmann::json{{"family", "beta2"}, {"theta", {1.0}}}), ValidationError);
}
