#include "augsurv/augmentation.hpp"

#include "augsurv/error.hpp"
#include "augsurv/random.hpp"
#include "augsurv/regression_problem.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace augsurv {
namespace {

Interval interval_or_point(double point, double se, double level) {
  if (se > 0.0) return confidence_interval(point, se, level);
  return {point, point};
}

void finish_report(EstimateReport& report, const InitialEstimate& initial, double ci_level) {
  report.unadjusted.point = initial.theta;
  report.unadjusted.se = std::sqrt(initial.psi.variance_estimate());
  report.ci_level = ci_level;
  report.unadjusted_ci = interval_or_point(report.unadjusted.point, report.unadjusted.se, ci_level);
  report.ci = interval_or_point(report.augmented.point, report.augmented.se, ci_level);
}

std::string measure_label(const InfluenceVector& psi) { return to_string(psi.measure); }

}  // namespace

CrossFitPlan CrossFitPlan::from_assignment(std::vector<int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error("cross-fitting needs k >= 2");
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int v : labels) {
    if (v < 1 || v > k) throw Error("fold label outside 1..k");
    ++sizes[static_cast<std::size_t>(v - 1)];
  }
  for (std::size_t s : sizes) {
    if (s == 0) throw Error("cross-fit plan has an empty fold");
  }
  CrossFitPlan plan;
  plan.k = k;
  plan.assignment = std::move(labels);
  plan.seed = seed;
  return plan;
}

std::vector<std::size_t> CrossFitPlan::fold_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> CrossFitPlan::complement_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) rows.push_back(i);
  }
  return rows;
}

CrossFitPlan make_plan(std::size_t n, std::span<const int> treatment, std::span<const int> event, int k,
                       std::uint64_t seed) {
  if (k < 2) throw Error("cross-fitting needs k >= 2");
  if (n < 4 * static_cast<std::size_t>(k)) throw Error("cross-fitting needs n >= 4k");
  if (treatment.size() != n || event.size() != n) throw Error("plan inputs differ in length");

  Rng rng(seed);
  std::vector<int> labels(n);
  const auto folds = static_cast<std::size_t>(k);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (auto& v : labels) v = 1 + static_cast<int>(uniform_index(rng, folds));
    std::vector<int> treated(folds, 0), control(folds, 0), events(folds, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto f = static_cast<std::size_t>(labels[i] - 1);
      (treatment[i] == 1 ? treated : control)[f] += 1;
      events[f] += event[i];
    }
    bool ok = true;
    for (std::size_t f = 0; f < folds && ok; ++f) ok = treated[f] > 0 && control[f] > 0 && events[f] > 0;
    if (ok) return CrossFitPlan::from_assignment(labels, k, seed);
  }
  throw Error("cross-fit plan infeasible");
}

Interval confidence_interval(double point, double se, double level) {
  if (!(se > 0.0)) throw Error("standard error must be positive");
  if (!(level > 0.0 && level < 1.0)) throw Error("confidence level must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + level));
  return {point - z * se, point + z * se};
}

InitialEstimate initial_estimate(const TrialDataset& data, const EffectMeasureSpec& spec) {
  return {estimate(spec, data), estimate_influence(spec, data)};
}

CrossFitNuisance prepare_cross_fit(const TrialDataset& data, const EffectMeasureSpec& spec,
                                   const CrossFitPlan& plan) {
  if (plan.assignment.size() != data.n()) throw Error("cross-fit plan does not match the dataset size");
  CrossFitNuisance nuisance;
  for (int fold = 1; fold <= plan.k; ++fold) {
    CrossFitNuisance::Fold f;
    f.held_out = plan.fold_rows(fold);
    f.complement = plan.complement_rows(fold);
    const TrialDataset train = data.subset(f.complement);
    f.complement_psi = estimate_influence(spec, train).values;
    f.held_out_psi = influence_out_of_sample(spec, train, data, f.held_out);
    nuisance.folds.push_back(std::move(f));
  }
  return nuisance;
}

EstimateReport augment_no_split(const TrialDataset& data, const EffectMeasureSpec& spec, const LearnerSpec& learner,
                                std::uint64_t seed, double ci_level) {
  EstimateReport report = augment_no_split(data, initial_estimate(data, spec), learner, seed, ci_level);
  report.measure = spec.label();
  return report;
}

EstimateReport augment_no_split(const TrialDataset& data, const InitialEstimate& initial,
                                const LearnerSpec& learner, std::uint64_t seed, double ci_level) {
  const std::size_t n = data.n();
  const RegressionProblem problem = make_problem(data, initial.psi);
  const LearnerModel model = fit_learner(learner, problem, seed);
  const Eigen::VectorXd b = model.predict(data.covariates());
  if (!b.allFinite()) throw Error("learner produced non-finite predictions");

  double term = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double centered = data.treatment()[i] - data.pi();
    const double bi = b[static_cast<Eigen::Index>(i)];
    term += centered * bi;
    const double r = initial.psi.values[i] - centered * bi;
    ss += r * r;
  }
  const double nd = static_cast<double>(n);
  EstimateReport report;
  report.augmented.point = initial.theta - term / nd;
  report.augmented.se = std::sqrt(ss / (nd * nd));
  report.learner = learner;
  report.seed = seed;
  report.measure = measure_label(initial.psi);
  report.notes = model.notes();
  finish_report(report, initial, ci_level);
  return report;
}

EstimateReport augment_cross_fit(const TrialDataset& data, const EffectMeasureSpec& spec, const LearnerSpec& learner,
                                 const CrossFitPlan& plan, double ci_level) {
  const InitialEstimate initial = initial_estimate(data, spec);
  EstimateReport report =
      augment_cross_fit(data, initial, prepare_cross_fit(data, spec, plan), learner, plan, ci_level);
  report.measure = spec.label();
  return report;
}

EstimateReport augment_cross_fit(const TrialDataset& data, const InitialEstimate& initial,
                                 const CrossFitNuisance& nuisance, const LearnerSpec& learner,
                                 const CrossFitPlan& plan, double ci_level) {
  const std::size_t n = data.n();
  if (plan.assignment.size() != n || nuisance.folds.size() != static_cast<std::size_t>(plan.k)) {
    throw Error("cross-fit plan does not match the dataset");
  }
  const double pi = data.pi();
  EstimateReport report;
  double term = 0.0, ss = 0.0;
  for (int fold = 1; fold <= plan.k; ++fold) {
    const auto& f = nuisance.folds[static_cast<std::size_t>(fold - 1)];
    const TrialDataset train = data.subset(f.complement);
    const RegressionProblem problem = make_problem(train, f.complement_psi);
    const LearnerModel model =
        fit_learner(learner, problem, derive_seed(plan.seed, static_cast<std::uint64_t>(fold)));
    for (const auto& note : model.notes()) report.notes.push_back("fold " + std::to_string(fold) + ": " + note);
    std::vector<double> x(data.p());
    for (std::size_t k = 0; k < f.held_out.size(); ++k) {
      const std::size_t i = f.held_out[k];
      for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] = data.covariates()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      const double bi = model.predict(x);
      if (!std::isfinite(bi)) throw Error("learner produced non-finite predictions");
      const double centered = data.treatment()[i] - pi;
      term += centered * bi;
      const double r = f.held_out_psi[k] - centered * bi;
      ss += r * r;
    }
  }
  const double nd = static_cast<double>(n);
  report.augmented.point = initial.theta - term / nd;
  report.augmented.se = std::sqrt(ss / (nd * nd));
  report.learner = learner;
  report.splitting = plan;
  report.seed = plan.seed;
  report.measure = measure_label(initial.psi);
  finish_report(report, initial, ci_level);
  return report;
}

}  // namespace augsurv
