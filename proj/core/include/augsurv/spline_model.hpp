#pragma once

#include "augsurv/learner.hpp"

#include <vector>

namespace augsurv {

/// Natural cubic spline expansion of one covariate (linear beyond the
/// boundary knots). A column with fewer than three distinct knots, or with
/// at most two distinct values, is kept linear.
class NaturalSplineBasis {
 public:
  NaturalSplineBasis() = default;
  explicit NaturalSplineBasis(std::vector<double> knots);

  /// Number of basis functions, including the linear term.
  std::size_t size() const noexcept { return knots_.size() < 3 ? 1 : knots_.size() - 1; }
  void evaluate(double x, double* out) const;
  const std::vector<double>& knots() const noexcept { return knots_; }

 private:
  double truncated(double x, std::size_t k) const;
  std::vector<double> knots_;
  double scale_ = 1.0;
};

/// Weighted quantile: smallest value whose cumulative weight reaches q.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);

class AdditiveSplinePredictor final : public Predictor {
 public:
  AdditiveSplinePredictor(std::vector<NaturalSplineBasis> bases, Eigen::VectorXd coefficients);
  double predict(std::span<const double> x) const override;
  std::size_t design_width() const noexcept { return static_cast<std::size_t>(coefficients_.size()); }

 private:
  std::vector<NaturalSplineBasis> bases_;
  Eigen::VectorXd coefficients_;
};

/// Additive model sum_j f_j(W_j): knots at the minimum, weighted quartiles
/// and maximum of each continuous column, fit jointly by weighted least
/// squares. Requires n >= 10 p.
LearnerModel fit_spline_additive(const RegressionProblem& problem);

}  // namespace augsurv
