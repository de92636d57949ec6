#pragma once

#include "augsurv/learner.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace augsurv {

/// Convex combination of candidate learners with weights chosen by V-fold
/// cross-validated weighted risk.
struct SuperLearnerModel {
  std::vector<LearnerKind> kinds;        // surviving candidates
  std::vector<LearnerModel> candidates;  // refit on the full problem
  Eigen::VectorXd weights;               // on the simplex
  Eigen::VectorXd cv_risks;              // per candidate
  double combined_cv_risk = 0.0;
  Eigen::MatrixXd cv_predictions;        // out-of-fold predictions, n x m
  std::vector<int> folds;                // fold label per row, 0-based
  std::vector<std::string> warnings;

  LearnerModel as_model() const;
};

/// Arm-stratified fold labels in 0..v-1 for a problem's rows.
std::vector<int> stratified_folds(std::span<const int> stratum, int v_folds, std::uint64_t seed);

/// Cross-validated stacking. Out-of-fold predictions Z are combined by
/// non-negative least squares on the weighted problem and normalized to sum
/// one; if NNLS returns zero, or the normalized combination has a higher CV
/// risk than the best single candidate, that candidate alone gets weight one.
/// A candidate that fails in any fold is dropped with a warning.
SuperLearnerModel fit_super_learner(const RegressionProblem& problem, const std::vector<LearnerSpec>& candidates,
                                    int v_folds, std::uint64_t seed);

}  // namespace augsurv
