#include "augsurv/cox.hpp"
#include "augsurv/effect_measures.hpp"
#include "augsurv/error.hpp"
#include "augsurv/scenario.hpp"
#include "augsurv/survival.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace augsurv;
using augsurv::test_support::exponential_trial;

namespace {

std::vector<EffectMeasureSpec> survival_measures(double tau) {
  return {EffectMeasureSpec::log_hr(), EffectMeasureSpec::surv_diff(tau), EffectMeasureSpec::rmst_diff(tau)};
}

TrialDataset with_covariates(const TrialDataset& data, Eigen::MatrixXd w) {
  return TrialDataset(std::move(w), {data.treatment().begin(), data.treatment().end()},
                      {data.time().begin(), data.time().end()}, {data.event().begin(), data.event().end()},
                      data.pi());
}

}  // namespace

TEST(Estimate, IdenticalArmsGiveZero) {
  std::vector<double> x{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<int> d{1, 0, 1, 1, 0, 1};
  std::vector<double> xx;
  std::vector<int> dd, a;
  for (int arm = 0; arm < 2; ++arm) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      xx.push_back(x[i]);
      dd.push_back(d[i]);
      a.push_back(arm);
    }
  }
  const TrialDataset data(Eigen::MatrixXd::Zero(12, 1), a, xx, dd, 0.5);
  for (const auto& spec : survival_measures(2.2)) EXPECT_NEAR(estimate(spec, data), 0.0, 1e-12) << spec.label();
  std::vector<int> all(12, 1);
  const TrialDataset uncensored(Eigen::MatrixXd::Zero(12, 1), a, xx, all, 0.5);
  EXPECT_NEAR(estimate(EffectMeasureSpec::mean_diff(), uncensored), 0.0, 1e-12);
}

TEST(Estimate, SurvivalAndRmstDifferencesFromArmCurves) {
  const TrialDataset data = exponential_trial(200, 31);
  const double tau = 1.2;
  const auto x1 = test_support::arm_values(data, 1, true), x0 = test_support::arm_values(data, 0, true);
  const auto d1 = test_support::arm_events(data, 1), d0 = test_support::arm_events(data, 0);
  EXPECT_NEAR(estimate(EffectMeasureSpec::surv_diff(tau), data),
              test_support::brute_km(x1, d1, tau) - test_support::brute_km(x0, d0, tau), 1e-13);
  EXPECT_NEAR(estimate(EffectMeasureSpec::rmst_diff(tau), data),
              rmst(kaplan_meier(x1, d1), tau) - rmst(kaplan_meier(x0, d0), tau), 1e-13);
  EXPECT_NEAR(estimate(EffectMeasureSpec::log_hr(), data), cox_unadjusted(data).log_hr(), 1e-14);
}

TEST(Estimate, MeanDiffRejectsCensoring) {
  const TrialDataset data = exponential_trial(50, 1);
  try {
    estimate(EffectMeasureSpec::mean_diff(), data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "mean_diff requires uncensored data");
  }
}

TEST(Estimate, TauBeyondSupportThrows) {
  const TrialDataset data = exponential_trial(50, 1, 2.0);
  try {
    estimate(EffectMeasureSpec::surv_diff(5.0), data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "tau outside support");
  }
}

TEST(EffectMeasureSpec, TauPresentExactlyWhenNeeded) {
  EXPECT_THROW(EffectMeasureSpec::builtin(MeasureId::surv_diff, std::nullopt), Error);
  EXPECT_THROW(EffectMeasureSpec::builtin(MeasureId::log_hr, 2.0), Error);
  EXPECT_NO_THROW(EffectMeasureSpec::builtin(MeasureId::rmst_diff, 2.0));
  EXPECT_EQ(parse_measure("rmst-diff"), MeasureId::rmst_diff);
  EXPECT_EQ(parse_measure("log_hr"), MeasureId::log_hr);
  const auto custom = EffectMeasureSpec::custom("median", [](const TrialDataset&) { return 0.0; });
  EXPECT_EQ(custom.influence_mode, InfluenceMode::jackknife);
}

TEST(AnalyticInfluence, MeanDiffOneSubjectPerArm) {
  const TrialDataset data(Eigen::MatrixXd::Zero(2, 1), {1, 0}, {3.0, 1.0}, {1, 1}, 0.5);
  const InfluenceVector psi = analytic_influence(EffectMeasureSpec::mean_diff(), data);
  EXPECT_DOUBLE_EQ(psi.values[0], 0.0);
  EXPECT_DOUBLE_EQ(psi.values[1], 0.0);
}

TEST(AnalyticInfluence, MeanDiffClosedForm) {
  const TrialDataset data = exponential_trial(60, 4, 0.0);
  const auto psi = analytic_influence(EffectMeasureSpec::mean_diff(), data).values;
  const auto x1 = test_support::arm_values(data, 1, true), x0 = test_support::arm_values(data, 0, true);
  const double m1 = std::accumulate(x1.begin(), x1.end(), 0.0) / x1.size();
  const double m0 = std::accumulate(x0.begin(), x0.end(), 0.0) / x0.size();
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double a = data.treatment()[i];
    const double expected = a / 0.5 * (data.time()[i] - m1) - (1 - a) / 0.5 * (data.time()[i] - m0);
    EXPECT_NEAR(psi[i], expected, 1e-12);
  }
}

TEST(AnalyticInfluence, SurvivalDifferenceVarianceIsGreenwoodWithoutCensoring) {
  const TrialDataset data = exponential_trial(200, 7, 0.0);
  ASSERT_EQ(data.arm_size(1), 100u);
  const double tau = 0.9;
  const InfluenceVector psi = analytic_influence(EffectMeasureSpec::surv_diff(tau), data);
  const double gw = test_support::greenwood(test_support::arm_values(data, 1, true), test_support::arm_events(data, 1), tau) +
                    test_support::greenwood(test_support::arm_values(data, 0, true), test_support::arm_events(data, 0), tau);
  EXPECT_NEAR(psi.variance_estimate(), gw, 1e-10 * gw);
}

TEST(AnalyticInfluence, SurvivalDifferenceVarianceIsGreenwoodWithCensoring) {
  const TrialDataset data = exponential_trial(300, 8, 2.5);
  const double tau = 1.1;
  const InfluenceVector psi = analytic_influence(EffectMeasureSpec::surv_diff(tau), data);
  const double gw = test_support::greenwood(test_support::arm_values(data, 1, true), test_support::arm_events(data, 1), tau) +
                    test_support::greenwood(test_support::arm_values(data, 0, true), test_support::arm_events(data, 0), tau);
  EXPECT_NEAR(psi.variance_estimate(), gw, 1e-10 * gw);
}

TEST(AnalyticInfluence, LogHazardRatioVarianceIsLinWeiRobustVariance) {
  const TrialDataset data = exponential_trial(300, 13);
  const CoxFit fit = cox_unadjusted(data);
  double robust = 0.0;
  for (double u : fit.score_residuals()) robust += u * u;
  robust /= fit.information() * fit.information();
  const InfluenceVector psi = analytic_influence(EffectMeasureSpec::log_hr(), data);
  EXPECT_NEAR(psi.variance_estimate(), robust, 1e-8 * robust);
}

TEST(AnalyticInfluence, MeanZeroAndFinite) {
  const TrialDataset data = exponential_trial(250, 14);
  for (const auto& spec : survival_measures(1.5)) {
    const auto psi = analytic_influence(spec, data).values;
    double mean = 0.0;
    for (double v : psi) {
      ASSERT_TRUE(std::isfinite(v));
      mean += v;
    }
    mean /= static_cast<double>(psi.size());
    EXPECT_LE(std::abs(mean), 1e-6 * test_support::sample_sd(psi)) << spec.label();
  }
}

TEST(AnalyticInfluence, ArmSwapNegates) {
  const TrialDataset data = exponential_trial(150, 15);
  const TrialDataset swapped = data.swap_arms();
  for (const auto& spec : survival_measures(1.5)) {
    const auto a = analytic_influence(spec, data).values;
    const auto b = analytic_influence(spec, swapped).values;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], -b[i], 1e-8) << spec.label();
  }
}

TEST(AnalyticInfluence, KaplanMeierMeasuresIgnoreCovariates) {
  const TrialDataset data = exponential_trial(120, 16);
  const TrialDataset other = with_covariates(data, Eigen::MatrixXd::Random(120, 4));
  for (const auto& spec : {EffectMeasureSpec::surv_diff(1.0), EffectMeasureSpec::rmst_diff(1.0)}) {
    EXPECT_EQ(analytic_influence(spec, data).values, analytic_influence(spec, other).values);
  }
}

TEST(OracleEquivalence, AnalyticAgreesWithJackknifeForBuiltins) {
  ScenarioSpec scenario;
  scenario.n = 200;
  const TrialDataset censored = generate_trial(scenario, 2024);
  const TrialDataset uncensored = exponential_trial(200, 2025, 0.0);
  std::vector<std::pair<EffectMeasureSpec, const TrialDataset*>> cases;
  for (const auto& spec : survival_measures(2.0)) cases.emplace_back(spec, &censored);
  cases.emplace_back(EffectMeasureSpec::mean_diff(), &uncensored);
  for (const auto& [spec, data] : cases) {
    const auto analytic = analytic_influence(spec, *data);
    const auto jack = jackknife_influence(spec, *data);
    EXPECT_EQ(jack.provenance, InfluenceMode::jackknife);
    EXPECT_GE(test_support::pearson(analytic.values, jack.values), 0.99) << spec.label();
    const double ratio = jack.variance_estimate() / analytic.variance_estimate();
    EXPECT_GE(ratio, 0.8) << spec.label();
    EXPECT_LE(ratio, 1.25) << spec.label();
  }
}

TEST(Jackknife, MeanDiffIsRescaledAnalytic) {
  // leaving out arm-a subject i moves the arm mean by (x_i - mean_a) / (n_a - 1)
  const TrialDataset data = exponential_trial(100, 41, 0.0, 2, 0.4);
  const auto a = analytic_influence(EffectMeasureSpec::mean_diff(), data).values;
  const auto j = jackknife_influence(EffectMeasureSpec::mean_diff(), data).values;
  const double n1 = static_cast<double>(data.arm_size(1)), n0 = static_cast<double>(data.arm_size(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double factor = data.treatment()[i] == 1 ? 99.0 * 0.4 / (n1 - 1.0) : 99.0 * 0.6 / (n0 - 1.0);
    EXPECT_NEAR(j[i], factor * a[i], 1e-12 * (1.0 + std::abs(a[i])));
  }
}

TEST(Jackknife, ConstantEstimatorGivesZero) {
  const auto spec = EffectMeasureSpec::custom("constant", [](const TrialDataset&) { return 4.2; });
  const auto psi = jackknife_influence(spec, exponential_trial(30, 1)).values;
  for (double v : psi) EXPECT_EQ(v, 0.0);
}

TEST(Jackknife, CenteredToZeroMean) {
  const auto psi = jackknife_influence(EffectMeasureSpec::rmst_diff(1.0), exponential_trial(80, 3)).values;
  EXPECT_NEAR(std::accumulate(psi.begin(), psi.end(), 0.0), 0.0, 1e-10);
}

TEST(Jackknife, LogHazardRatioVarianceNearAnalytic) {
  ScenarioSpec scenario;
  scenario.n = 250;
  const TrialDataset data = generate_trial(scenario, 77);
  const double a = analytic_influence(EffectMeasureSpec::log_hr(), data).variance_estimate();
  const double j = jackknife_influence(EffectMeasureSpec::log_hr(), data).variance_estimate();
  EXPECT_NEAR(j / a, 1.0, 0.10);
}

TEST(Jackknife, FailureNamesSubject) {
  // the only treated event is subject 0; leaving it out leaves no treated events
  const TrialDataset data(Eigen::MatrixXd::Zero(6, 1), {1, 1, 1, 0, 0, 0}, {1, 2, 3, 1.5, 2.5, 3.5},
                          {1, 0, 0, 1, 1, 0}, 0.5);
  try {
    jackknife_influence(EffectMeasureSpec::log_hr(), data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("subject 0"), std::string::npos) << e.what();
  }
}

TEST(CustomMeasure, AnalyticInfluenceIsUsedWhenSupplied) {
  const auto spec = EffectMeasureSpec::custom(
      "treated fraction", [](const TrialDataset& d) { return static_cast<double>(d.arm_size(1)) / d.n(); },
      [](const TrialDataset&, const TrialDataset& source, std::span<const std::size_t> rows) {
        std::vector<double> out;
        for (std::size_t i : rows) out.push_back(source.treatment()[i] - 0.5);
        return out;
      });
  EXPECT_EQ(spec.influence_mode, InfluenceMode::analytic);
  const TrialDataset data = exponential_trial(20, 2);
  const auto psi = estimate_influence(spec, data);
  EXPECT_EQ(psi.provenance, InfluenceMode::analytic);
  EXPECT_DOUBLE_EQ(psi.values[0], data.treatment()[0] - 0.5);
}

TEST(OutOfSampleInfluence, FittedOnSameDataEqualsInSample) {
  const TrialDataset data = exponential_trial(90, 6);
  std::vector<std::size_t> rows(data.n());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (const auto& spec : survival_measures(1.0)) {
    const auto in = analytic_influence(spec, data).values;
    const auto out = influence_out_of_sample(spec, data, data, rows);
    for (std::size_t i = 0; i < in.size(); ++i) EXPECT_NEAR(in[i], out[i], 1e-10) << spec.label();
  }
}

TEST(OutOfSampleInfluence, AddOneJackknifeForCustomMeasures) {
  const TrialDataset data = exponential_trial(40, 9, 0.0);
  std::vector<std::size_t> train(30), held{30, 31};
  std::iota(train.begin(), train.end(), std::size_t{0});
  const TrialDataset fitted = data.subset(train);
  auto spec = EffectMeasureSpec::custom("mean", [](const TrialDataset& d) {
    return std::accumulate(d.time().begin(), d.time().end(), 0.0) / d.n();
  });
  const auto psi = influence_out_of_sample(spec, fitted, data, held);
  const double base = estimate(spec, fitted);
  for (std::size_t k = 0; k < held.size(); ++k) {
    const double added = (base * 30.0 + data.time()[held[k]]) / 31.0;
    EXPECT_NEAR(psi[k], 30.0 * (added - base), 1e-12);
  }
}
