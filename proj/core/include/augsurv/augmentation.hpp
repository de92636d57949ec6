#pragma once

#include "augsurv/dataset.hpp"
#include "augsurv/effect_measures.hpp"
#include "augsurv/learner.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace augsurv {

/// Random partition of subjects into K folds, labels 1..K.
struct CrossFitPlan {
  int k = 5;
  std::vector<int> assignment;
  std::uint64_t seed = 0;

  /// Explicit labels. Only checks that labels lie in 1..k and no fold is
  /// empty; leave-one-out plans are therefore allowed.
  static CrossFitPlan from_assignment(std::vector<int> labels, int k, std::uint64_t seed = 0);

  std::vector<std::size_t> fold_rows(int fold) const;
  std::vector<std::size_t> complement_rows(int fold) const;
};

/// i.i.d. uniform labels, redrawn (up to 100 draws) until every fold is
/// non-empty, holds both arms and at least one event. Requires k >= 2 and
/// n >= 4k.
CrossFitPlan make_plan(std::size_t n, std::span<const int> treatment, std::span<const int> event, int k,
                       std::uint64_t seed);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double value) const noexcept { return lower <= value && value <= upper; }
};

/// point +/- Phi^{-1}((1 + level) / 2) * se
Interval confidence_interval(double point, double se, double level = 0.95);

struct PointEstimate {
  double point = 0.0;
  double se = 0.0;
};

struct EstimateReport {
  PointEstimate unadjusted;
  PointEstimate augmented;
  Interval unadjusted_ci;
  Interval ci;
  double ci_level = 0.95;
  std::string measure;
  LearnerSpec learner;
  std::optional<CrossFitPlan> splitting;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
};

/// The initial estimate and its full-sample influence vector.
struct InitialEstimate {
  double theta = 0.0;
  InfluenceVector psi;
};

InitialEstimate initial_estimate(const TrialDataset& data, const EffectMeasureSpec& spec);

/// Fold-complement influence quantities, shared by every learner that is
/// cross-fit on the same plan.
struct CrossFitNuisance {
  struct Fold {
    std::vector<std::size_t> held_out;
    std::vector<std::size_t> complement;
    std::vector<double> complement_psi;  // in-sample influence on the complement
    std::vector<double> held_out_psi;    // complement nuisance evaluated at held-out subjects
  };
  std::vector<Fold> folds;
};

CrossFitNuisance prepare_cross_fit(const TrialDataset& data, const EffectMeasureSpec& spec, const CrossFitPlan& plan);

/// theta_hat(b) = theta_bar - (1/n) sum (A_i - pi) b(W_i) with b fit on the
/// full sample; se from (1/n) sum {psi_i - (A_i - pi) b(W_i)}^2.
EstimateReport augment_no_split(const TrialDataset& data, const EffectMeasureSpec& spec, const LearnerSpec& learner,
                                std::uint64_t seed, double ci_level = 0.95);
EstimateReport augment_no_split(const TrialDataset& data, const InitialEstimate& initial,
                                const LearnerSpec& learner, std::uint64_t seed, double ci_level = 0.95);

/// Cross-fit estimator: theta_bar stays full-sample; psi and b are fit on
/// each fold complement and evaluated on the held-out fold.
EstimateReport augment_cross_fit(const TrialDataset& data, const EffectMeasureSpec& spec, const LearnerSpec& learner,
                                 const CrossFitPlan& plan, double ci_level = 0.95);
EstimateReport augment_cross_fit(const TrialDataset& data, const InitialEstimate& initial,
                                 const CrossFitNuisance& nuisance, const LearnerSpec& learner,
                                 const CrossFitPlan& plan, double ci_level = 0.95);

}  // namespace augsurv
