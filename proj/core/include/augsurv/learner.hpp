#pragma once

#include "augsurv/regression_problem.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace augsurv {

enum class LearnerKind { zero, linear, spline_additive, tree, random_forest, super_learner };

std::string to_string(LearnerKind kind);
/// Accepts the CLI spellings (linear, spline, tree, forest, super, zero) and
/// the full kind names.
LearnerKind parse_learner(const std::string& text);

struct TreeOptions {
  int max_depth = 4;  // 0 = unlimited
  double min_leaf_weight_fraction = 0.05;
};

struct ForestOptions {
  int n_trees = 200;
  int mtry = 0;  // 0 = ceil(p / 3)
  double min_leaf_weight_fraction = 0.01;
  bool bootstrap = true;
  int max_depth = 0;
};

/// Which learner to fit and its hyperparameters.
struct LearnerSpec {
  LearnerKind kind = LearnerKind::linear;
  TreeOptions tree;
  ForestOptions forest;
  std::vector<LearnerKind> candidates;  // super learner only
  int v_folds = 5;                      // super learner only

  static LearnerSpec of(LearnerKind kind);
  static LearnerSpec super_learner(std::vector<LearnerKind> candidates = default_candidates());
  static std::vector<LearnerKind> default_candidates();

  LearnerSpec candidate(LearnerKind kind) const;
  std::string label() const;
};

/// Fitted regression function. Implementations are immutable once built.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict(std::span<const double> x) const = 0;
};

class LearnerModel {
 public:
  LearnerModel(LearnerKind kind, std::shared_ptr<const Predictor> predictor,
               std::vector<std::string> notes = {});

  LearnerKind kind() const noexcept { return kind_; }
  double predict(std::span<const double> x) const { return predictor_->predict(x); }
  Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;

  /// Fit-time remarks such as a ridge fallback or a dropped candidate.
  const std::vector<std::string>& notes() const noexcept { return notes_; }

  template <class T>
  const T* as() const noexcept {
    return dynamic_cast<const T*>(predictor_.get());
  }

 private:
  LearnerKind kind_;
  std::shared_ptr<const Predictor> predictor_;
  std::vector<std::string> notes_;
};

/// b == 0; fitting it reproduces the unadjusted estimator.
LearnerModel fit_zero(const RegressionProblem& problem);

LearnerModel fit_learner(const LearnerSpec& spec, const RegressionProblem& problem, std::uint64_t seed);

}  // namespace augsurv
