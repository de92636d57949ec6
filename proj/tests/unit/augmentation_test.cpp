#include "augsurv/augmentation.hpp"
#include "augsurv/error.hpp"
#include "augsurv/linear_model.hpp"
#include "augsurv/monte_carlo.hpp"
#include "augsurv/regression_problem.hpp"
#include "augsurv/scenario.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace augsurv;

namespace {

std::vector<EffectMeasureSpec> censored_measures() {
  return {EffectMeasureSpec::log_hr(), EffectMeasureSpec::surv_diff(1.0), EffectMeasureSpec::rmst_diff(1.5)};
}

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// psi of a mean difference with arm means from `fit_rows`, evaluated at subject i.
double mean_diff_psi(const TrialDataset& data, const std::vector<std::size_t>& fit_rows, std::size_t i) {
  double s1 = 0.0, s0 = 0.0, n1 = 0.0, n0 = 0.0;
  for (std::size_t j : fit_rows) {
    if (data.treatment()[j] == 1) {
      s1 += data.time()[j];
      n1 += 1.0;
    } else {
      s0 += data.time()[j];
      n0 += 1.0;
    }
  }
  const double pi = data.pi();
  const double x = data.time()[i];
  return data.treatment()[i] == 1 ? (x - s1 / n1) / pi : -(x - s0 / n0) / (1.0 - pi);
}

}  // namespace

TEST(ConfidenceInterval, StandardNormal) {
  const Interval ci = confidence_interval(0.0, 1.0, 0.95);
  EXPECT_NEAR(ci.lower, -1.959963984540054, 1e-12);
  EXPECT_NEAR(ci.upper, 1.959963984540054, 1e-12);
}

TEST(ConfidenceInterval, ColonLogHazardRatio) {
  const Interval ci = confidence_interval(-0.385, 0.121, 0.95);
  EXPECT_NEAR(ci.lower, -0.6222, 5e-5);
  EXPECT_NEAR(ci.upper, -0.1478, 5e-5);
}

TEST(ConfidenceInterval, WidensWithLevel) {
  double width = 0.0;
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.99, 0.999, 0.999999}) {
    const Interval ci = confidence_interval(1.0, 0.3, level);
    EXPECT_GT(ci.upper - ci.lower, width);
    width = ci.upper - ci.lower;
  }
  EXPECT_THROW(confidence_interval(0.0, 0.0), Error);
  EXPECT_THROW(confidence_interval(0.0, 1.0, 1.0), Error);
}

TEST(MakePlan, LabelsAndDeterminism) {
  const TrialDataset data = test_support::exponential_trial(100, 1);
  const CrossFitPlan plan = make_plan(100, data.treatment(), data.event(), 5, 42);
  ASSERT_EQ(plan.assignment.size(), 100u);
  std::size_t total = 0;
  for (int fold = 1; fold <= 5; ++fold) {
    const auto rows = plan.fold_rows(fold);
    EXPECT_FALSE(rows.empty());
    total += rows.size();
    int treated = 0, events = 0;
    for (std::size_t i : rows) {
      treated += data.treatment()[i];
      events += data.event()[i];
    }
    EXPECT_GT(treated, 0);
    EXPECT_LT(treated, static_cast<int>(rows.size()));
    EXPECT_GT(events, 0);
  }
  EXPECT_EQ(total, 100u);
  for (int v : plan.assignment) {
    EXPECT_GE(v, 1);
    EXPECT_LE(v, 5);
  }
  EXPECT_EQ(make_plan(100, data.treatment(), data.event(), 5, 42).assignment, plan.assignment);
  EXPECT_NE(make_plan(100, data.treatment(), data.event(), 5, 43).assignment, plan.assignment);
}

TEST(MakePlan, FoldSizesAverageOneFifth) {
  const TrialDataset data = test_support::exponential_trial(100, 2);
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const CrossFitPlan plan = make_plan(100, data.treatment(), data.event(), 5, seed);
    sum += static_cast<double>(plan.fold_rows(1).size());
  }
  // binomial(100, 1/5) fold size: SD 4, so the mean of 200 draws has SD 0.28
  EXPECT_NEAR(sum / 200.0, 20.0, 1.2);
}

TEST(MakePlan, InfeasibleWhenFoldsCannotAllHoldEvents) {
  std::vector<int> a(40), d(40, 0);
  for (std::size_t i = 0; i < 40; ++i) a[i] = static_cast<int>(i % 2);
  d[1] = d[3] = 1;  // two events, both in arm 1
  try {
    make_plan(40, a, d, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "cross-fit plan infeasible");
  }
  EXPECT_THROW(make_plan(19, std::vector<int>(19, 0), std::vector<int>(19, 1), 5, 1), Error);
  EXPECT_THROW(make_plan(40, a, d, 1, 1), Error);
}

TEST(NoSplit, ZeroLearnerIsIdentity) {
  const TrialDataset data = test_support::exponential_trial(150, 3);
  for (const auto& spec : censored_measures()) {
    const EstimateReport r = augment_no_split(data, spec, LearnerSpec::of(LearnerKind::zero), 1);
    EXPECT_EQ(r.augmented.point, r.unadjusted.point) << spec.label();
    EXPECT_EQ(r.augmented.se, r.unadjusted.se) << spec.label();
    EXPECT_DOUBLE_EQ(r.unadjusted.point, estimate(spec, data));
    EXPECT_DOUBLE_EQ(r.unadjusted.se, std::sqrt(analytic_influence(spec, data).variance_estimate()));
  }
}

TEST(NoSplit, ConstantAugmentationCancelsUnderExactBalance) {
  // no covariates: the linear learner fits an intercept only
  const TrialDataset data = test_support::exponential_trial(120, 4, 3.0, 0);
  ASSERT_EQ(data.arm_size(1), 60u);
  for (const auto& spec : censored_measures()) {
    const EstimateReport r = augment_no_split(data, spec, LearnerSpec::of(LearnerKind::linear), 1);
    EXPECT_NEAR(r.augmented.point, r.unadjusted.point, 1e-14) << spec.label();
  }
}

TEST(NoSplit, AugmentationTermMatchesIndependentWeightedFit) {
  // unequal allocation, so sum (A - pi) != 0 and the intercept does not cancel
  const TrialDataset data = test_support::exponential_trial(101, 5, 3.0, 3, 0.6);
  for (const auto& spec : censored_measures()) {
    const InfluenceVector psi = analytic_influence(spec, data);
    const auto n = static_cast<Eigen::Index>(data.n());
    Eigen::MatrixXd x(n, 4);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = data.treatment()[static_cast<std::size_t>(i)] - data.pi();
      x(i, 0) = c;
      x.block(i, 1, 1, 3) = c * data.covariates().row(i);
      y[i] = psi.values[static_cast<std::size_t>(i)];
    }
    // b minimizes sum (psi - (A - pi) b(W))^2 directly, no reweighting
    const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd fitted = x * beta;
    const double term = fitted.sum() / static_cast<double>(n);
    const double sigma2 = (y - fitted).squaredNorm() / static_cast<double>(n);

    const EstimateReport r = augment_no_split(data, spec, LearnerSpec::of(LearnerKind::linear), 1);
    EXPECT_NEAR(r.augmented.point, estimate(spec, data) - term, 1e-10 * (1.0 + std::abs(term))) << spec.label();
    EXPECT_NEAR(r.augmented.se, std::sqrt(sigma2 / static_cast<double>(n)), 1e-10) << spec.label();
    EXPECT_GT(std::abs(term), 1e-6);
  }
}

TEST(CrossFit, ZeroLearnerGivesCrossFittedPlugInVariance) {
  const TrialDataset data = test_support::exponential_trial(160, 6);
  const CrossFitPlan plan = make_plan(data.n(), data.treatment(), data.event(), 5, 7);
  for (const auto& spec : censored_measures()) {
    const EstimateReport r = augment_cross_fit(data, spec, LearnerSpec::of(LearnerKind::zero), plan);
    EXPECT_EQ(r.augmented.point, r.unadjusted.point) << spec.label();
    const CrossFitNuisance nuisance = prepare_cross_fit(data, spec, plan);
    double ss = 0.0;
    for (const auto& f : nuisance.folds) ss += sum_sq(f.held_out_psi);
    EXPECT_NEAR(r.augmented.se, std::sqrt(ss) / static_cast<double>(data.n()), 1e-15) << spec.label();
  }
}

TEST(CrossFit, ZeroLearnerMeanDifferenceMatchesOutOfFoldMeans) {
  const TrialDataset data = test_support::exponential_trial(80, 8, 0.0);
  const CrossFitPlan plan = make_plan(data.n(), data.treatment(), data.event(), 4, 9);
  double ss = 0.0;
  for (int fold = 1; fold <= 4; ++fold) {
    const auto complement = plan.complement_rows(fold);
    for (std::size_t i : plan.fold_rows(fold)) ss += std::pow(mean_diff_psi(data, complement, i), 2);
  }
  const EstimateReport r =
      augment_cross_fit(data, EffectMeasureSpec::mean_diff(), LearnerSpec::of(LearnerKind::zero), plan);
  EXPECT_NEAR(r.augmented.se, std::sqrt(ss) / 80.0, 1e-14);
}

TEST(CrossFit, LinearMeanDifferenceMatchesDefinition) {
  const TrialDataset data = test_support::exponential_trial(90, 10, 0.0, 2, 0.5);
  const CrossFitPlan plan = make_plan(data.n(), data.treatment(), data.event(), 3, 11);
  double term = 0.0, ss = 0.0;
  for (int fold = 1; fold <= 3; ++fold) {
    const auto complement = plan.complement_rows(fold);
    const TrialDataset train = data.subset(complement);
    std::vector<double> psi_train;
    for (std::size_t i : complement) psi_train.push_back(mean_diff_psi(data, complement, i));
    const LearnerModel model = fit_linear(make_problem(train, psi_train));
    for (std::size_t i : plan.fold_rows(fold)) {
      const double c = data.treatment()[i] - data.pi();
      const Eigen::VectorXd w = data.covariates().row(static_cast<Eigen::Index>(i)).transpose();
      const double b = model.predict(std::span<const double>(w.data(), 2));
      term += c * b;
      ss += std::pow(mean_diff_psi(data, complement, i) - c * b, 2);
    }
  }
  const EstimateReport r =
      augment_cross_fit(data, EffectMeasureSpec::mean_diff(), LearnerSpec::of(LearnerKind::linear), plan);
  EXPECT_NEAR(r.augmented.point, r.unadjusted.point - term / 90.0, 1e-12);
  EXPECT_NEAR(r.augmented.se, std::sqrt(ss) / 90.0, 1e-12);
}

TEST(CrossFit, InvariantToFoldRelabeling) {
  const TrialDataset data = test_support::exponential_trial(150, 12);
  const CrossFitPlan plan = make_plan(data.n(), data.treatment(), data.event(), 5, 13);
  const int permutation[] = {0, 3, 5, 1, 2, 4};
  std::vector<int> relabeled = plan.assignment;
  for (int& v : relabeled) v = permutation[v];
  const CrossFitPlan other = CrossFitPlan::from_assignment(relabeled, 5, plan.seed);
  for (const auto& spec : censored_measures()) {
    const EstimateReport a = augment_cross_fit(data, spec, LearnerSpec::of(LearnerKind::linear), plan);
    const EstimateReport b = augment_cross_fit(data, spec, LearnerSpec::of(LearnerKind::linear), other);
    EXPECT_NEAR(a.augmented.point, b.augmented.point, 1e-12) << spec.label();
    EXPECT_NEAR(a.augmented.se, b.augmented.se, 1e-12) << spec.label();
  }
}

TEST(CrossFit, LeaveOneOutIsInvariantToSubjectOrder) {
  const TrialDataset data = test_support::exponential_trial(20, 14, 0.0, 1);
  std::vector<int> labels(20);
  std::iota(labels.begin(), labels.end(), 1);
  const CrossFitPlan plan = CrossFitPlan::from_assignment(labels, 20);
  const auto spec = EffectMeasureSpec::mean_diff();
  const EstimateReport base = augment_cross_fit(data, spec, LearnerSpec::of(LearnerKind::linear), plan);
  ASSERT_TRUE(std::isfinite(base.augmented.point));
  ASSERT_GT(base.augmented.se, 0.0);
  EXPECT_EQ(augment_cross_fit(data, spec, LearnerSpec::of(LearnerKind::linear), plan).augmented.point,
            base.augmented.point);

  std::mt19937_64 rng(15);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<std::size_t> order(20);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const TrialDataset permuted = data.subset(order);
    std::vector<int> permuted_labels(20);
    for (std::size_t k = 0; k < 20; ++k) permuted_labels[k] = labels[order[k]];
    const EstimateReport r = augment_cross_fit(permuted, spec, LearnerSpec::of(LearnerKind::linear),
                                               CrossFitPlan::from_assignment(permuted_labels, 20));
    EXPECT_NEAR(r.augmented.point, base.augmented.point, 1e-12);
    EXPECT_NEAR(r.augmented.se, base.augmented.se, 1e-12);
  }
}

TEST(CrossFit, PlanMustMatchData) {
  const TrialDataset data = test_support::exponential_trial(60, 16);
  const TrialDataset other = test_support::exponential_trial(64, 16);
  const CrossFitPlan plan = make_plan(other.n(), other.treatment(), other.event(), 4, 1);
  EXPECT_THROW(augment_cross_fit(data, EffectMeasureSpec::log_hr(), LearnerSpec::of(LearnerKind::linear), plan),
               Error);
}

TEST(CrossFit, ReportCarriesPlanAndInterval) {
  const TrialDataset data = test_support::exponential_trial(100, 17);
  const CrossFitPlan plan = make_plan(data.n(), data.treatment(), data.event(), 5, 18);
  const EstimateReport r =
      augment_cross_fit(data, EffectMeasureSpec::log_hr(), LearnerSpec::of(LearnerKind::linear), plan, 0.9);
  ASSERT_TRUE(r.splitting.has_value());
  EXPECT_EQ(r.splitting->assignment, plan.assignment);
  const Interval expected = confidence_interval(r.augmented.point, r.augmented.se, 0.9);
  EXPECT_DOUBLE_EQ(r.ci.lower, expected.lower);
  EXPECT_DOUBLE_EQ(r.ci.upper, expected.upper);
  EXPECT_DOUBLE_EQ(r.ci_level, 0.9);
}

TEST(Properties, UnbiasedUnderTheNull) {
  ScenarioSpec scenario;
  scenario.gamma = 0.0;
  std::vector<MeasureTarget> measures = {{EffectMeasureSpec::log_hr(), 0.0},
                                         {EffectMeasureSpec::surv_diff(2.0), 0.0},
                                         {EffectMeasureSpec::rmst_diff(2.0), 0.0}};
  const std::vector<EstimatorConfig> estimators = {{LearnerSpec::of(LearnerKind::linear), false, 5},
                                                   {LearnerSpec::of(LearnerKind::linear), true, 5}};
  MonteCarloOptions options;
  options.n_reps = 2000;
  options.master_seed = 2024;
  const MonteCarloResult result = run_monte_carlo(scenario, measures, estimators, options);
  ASSERT_EQ(result.metrics.size(), 9u);
  for (const SimMetrics& m : result.metrics) {
    EXPECT_EQ(m.n_failures, 0u);
    EXPECT_LT(std::abs(m.bias), 3.0 * m.sd / std::sqrt(static_cast<double>(m.n_reps)))
        << to_string(m.measure) << ' ' << m.estimator_id << (m.split ? " split" : "");
  }
}

TEST(Properties, ForestCrossFitVarianceExceedsResubstitution) {
  const ScenarioSpec scenario;
  const std::vector<MeasureTarget> measures = {{EffectMeasureSpec::log_hr(), 0.0}};
  const std::vector<EstimatorConfig> estimators = {{LearnerSpec::of(LearnerKind::random_forest), false, 5},
                                                   {LearnerSpec::of(LearnerKind::random_forest), true, 5}};
  MonteCarloOptions options;
  options.n_reps = 500;
  options.master_seed = 77;
  const MonteCarloResult result = run_monte_carlo(scenario, measures, estimators, options);
  std::map<std::size_t, std::pair<double, double>> variance;  // replicate -> (no split, split)
  std::map<std::size_t, int> complete;
  for (const ReplicateRecord& r : result.log) {
    if (r.estimator_id == "unadjusted" || r.failed) continue;
    (r.split ? variance[r.replicate].second : variance[r.replicate].first) = r.se * r.se;
    ++complete[r.replicate];
  }
  std::vector<double> diff;
  for (const auto& [rep, v] : variance) {
    if (complete[rep] == 2) diff.push_back(v.second - v.first);
  }
  ASSERT_GE(diff.size(), 495u);
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(diff.size());
  const double t = mean / (test_support::sample_sd(diff) / std::sqrt(static_cast<double>(diff.size())));
  // one-sided 1% critical value of the normal
  EXPECT_GT(t, 2.3263478740408408);
}
