#pragma once

#include "augsurv/learner.hpp"
#include "augsurv/tree.hpp"

#include <cstdint>
#include <vector>

namespace augsurv {

class ForestPredictor final : public Predictor {
 public:
  explicit ForestPredictor(std::vector<RegressionTree> trees) : trees_(std::move(trees)) {}
  double predict(std::span<const double> x) const override;
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<RegressionTree> trees_;
};

/// Bagged weighted CART. Tree t draws its bootstrap sample and split
/// columns from its own stream derive_seed(seed, t), so the fit is a pure
/// function of (problem, options, seed). Requires n >= 20.
LearnerModel fit_random_forest(const RegressionProblem& problem, const ForestOptions& options,
                               std::uint64_t seed);

}  // namespace augsurv
