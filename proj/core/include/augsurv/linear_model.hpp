#pragma once

#include "augsurv/learner.hpp"

namespace augsurv {

/// b(W) = (1, W') beta
class LinearPredictor final : public Predictor {
 public:
  explicit LinearPredictor(Eigen::VectorXd coefficients) : coefficients_(std::move(coefficients)) {}
  double predict(std::span<const double> x) const override;
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }

 private:
  Eigen::VectorXd coefficients_;
};

/// Weighted least squares of the response on (1, W). Requires n > p + 1.
LearnerModel fit_linear(const RegressionProblem& problem);

}  // namespace augsurv
