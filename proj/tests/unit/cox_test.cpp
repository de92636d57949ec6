#include "augsurv/cox.hpp"
#include "augsurv/error.hpp"
#include "augsurv/scenario.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace augsurv;

namespace {

struct Brute {
  double score = 0.0;
  double information = 0.0;
};

// Breslow score and information summed over events, risk sets by scanning.
Brute brute_score(const TrialDataset& data, double beta) {
  Brute out;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.event()[i] == 0) continue;
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t j = 0; j < data.n(); ++j) {
      if (data.time()[j] >= data.time()[i]) {
        const double r = std::exp(beta * data.treatment()[j]);
        s0 += r;
        s1 += r * data.treatment()[j];
      }
    }
    const double p = s1 / s0;
    out.score += data.treatment()[i] - p;
    out.information += p * (1.0 - p);
  }
  return out;
}

std::vector<double> brute_residuals(const TrialDataset& data, double beta) {
  const std::size_t n = data.n();
  std::vector<double> s0(n, 0.0), p(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (data.time()[k] >= data.time()[j]) {
        const double r = std::exp(beta * data.treatment()[k]);
        a += r;
        b += r * data.treatment()[k];
      }
    }
    s0[j] = a;
    p[j] = b / a;
  }
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = data.treatment()[i];
    double v = data.event()[i] * (ai - p[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (data.event()[j] == 1 && data.time()[i] >= data.time()[j]) {
        v -= std::exp(beta * ai) * (ai - p[j]) / s0[j];
      }
    }
    u[i] = v;
  }
  return u;
}

TrialDataset tied_trial(std::size_t n, std::uint64_t seed) {
  TrialDataset base = test_support::exponential_trial(n, seed, 2.5);
  std::vector<double> x(base.time().begin(), base.time().end());
  for (auto& v : x) v = std::ceil(v * 10.0) / 10.0;
  return TrialDataset(base.covariates(), {base.treatment().begin(), base.treatment().end()}, x,
                      {base.event().begin(), base.event().end()}, base.pi());
}

}  // namespace

TEST(Cox, RootMatchesBisectionOfBruteScore) {
  const TrialDataset data = tied_trial(400, 3);
  const CoxFit fit = cox_unadjusted(data);
  double lo = -5.0, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (brute_score(data, mid).score > 0.0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(fit.log_hr(), 0.5 * (lo + hi), 1e-8);
}

TEST(Cox, ScoreVanishesAtEstimate) {
  const TrialDataset data = tied_trial(500, 21);
  const CoxFit fit = cox_unadjusted(data);
  const double n = static_cast<double>(data.n());
  EXPECT_LT(std::abs(brute_score(data, fit.log_hr()).score), 1e-8 * n);
  EXPECT_LT(std::abs(cox_score(data.time(), data.event(), data.treatment(), fit.log_hr())), 1e-8 * n);
  double mean = 0.0;
  for (double u : fit.score_residuals()) mean += u;
  EXPECT_LT(std::abs(mean / n), 1e-8);
}

TEST(Cox, ScoreAgreesWithBruteForceAwayFromRoot) {
  const TrialDataset data = tied_trial(200, 4);
  for (double beta : {-1.0, -0.2, 0.0, 0.7}) {
    EXPECT_NEAR(cox_score(data.time(), data.event(), data.treatment(), beta), brute_score(data, beta).score, 1e-10);
  }
}

TEST(Cox, InformationMatchesBruteForce) {
  const TrialDataset data = tied_trial(300, 9);
  const CoxFit fit = cox_unadjusted(data);
  EXPECT_NEAR(fit.information(), brute_score(data, fit.log_hr()).information, 1e-9 * fit.information());
}

TEST(Cox, LinWeiResidualsMatchDefinition) {
  const TrialDataset data = tied_trial(250, 17);
  const CoxFit fit = cox_unadjusted(data);
  const std::vector<double> brute = brute_residuals(data, fit.log_hr());
  ASSERT_EQ(brute.size(), fit.score_residuals().size());
  double brute_var = 0.0, var = 0.0;
  for (std::size_t i = 0; i < brute.size(); ++i) {
    EXPECT_NEAR(fit.score_residuals()[i], brute[i], 1e-10);
    brute_var += brute[i] * brute[i];
    var += fit.score_residuals()[i] * fit.score_residuals()[i];
  }
  EXPECT_NEAR(var, brute_var, 1e-8 * brute_var);
}

TEST(Cox, OutOfSampleResidualOfTrainingSubjectEqualsInSample) {
  const TrialDataset data = tied_trial(120, 2);
  const CoxFit fit = cox_unadjusted(data);
  for (std::size_t i = 0; i < data.n(); ++i) {
    EXPECT_NEAR(fit.score_residual(outcome_of(data, i)), fit.score_residuals()[i], 1e-12);
  }
}

TEST(Cox, ArmSwapNegatesEstimate) {
  const TrialDataset data = tied_trial(300, 12);
  const CoxFit fit = cox_unadjusted(data);
  const CoxFit swapped = cox_unadjusted(data.swap_arms());
  EXPECT_NEAR(fit.log_hr(), -swapped.log_hr(), 1e-9);
  EXPECT_NEAR(fit.information(), swapped.information(), 1e-8 * fit.information());
}

TEST(Cox, MonotoneLikelihoodIsDegenerate) {
  const TrialDataset data(Eigen::MatrixXd(2, 0), {1, 0}, {1.0, 2.0}, {1, 1}, 0.5);
  // the score 1 - e^b / (e^b + 1) is positive for every b
  for (double b : {0.0, 5.0, 20.0}) {
    EXPECT_NEAR(cox_score(data.time(), data.event(), data.treatment(), b), 1.0 - std::exp(b) / (std::exp(b) + 1.0),
                1e-12);
  }
  try {
    cox_unadjusted(data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "partial likelihood degenerate");
  }
}

TEST(Cox, AllEventsInOneArmIsDegenerate) {
  const TrialDataset data(Eigen::MatrixXd(4, 0), {1, 1, 0, 0}, {1.0, 2.0, 3.0, 4.0}, {1, 1, 0, 0}, 0.5);
  EXPECT_THROW(cox_unadjusted(data), Error);
}

TEST(Cox, HugeTrialApproachesPopulationLimit) {
  ScenarioSpec spec;
  spec.n = 1'000'000;
  const TrialDataset data = generate_trial(spec, 99);
  const CoxFit fit = cox_unadjusted(data);
  double ss = 0.0;
  for (double u : fit.score_residuals()) ss += u * u;
  const double se = std::sqrt(ss) / fit.information();
  const double limit = test_support::LinearScenarioPopulation(0.5).cox_limit();
  EXPECT_NEAR(limit, -0.36304, 5e-5);
  EXPECT_NEAR(fit.log_hr(), limit, 4.0 * se);
}
