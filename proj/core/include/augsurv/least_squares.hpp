#pragma once

#include <Eigen/Dense>

namespace augsurv {

struct WeightedFit {
  Eigen::VectorXd coefficients;
  bool ridge_fallback = false;
};

/// Minimizes sum_i w_i (y_i - x_i' beta)^2 through the normal equations,
/// after scaling X'WX to unit diagonal. If a pivot of the scaled matrix
/// falls below 1e-10 relative to its largest diagonal entry, a ridge of
/// 1e-8 * trace / ncol is added and the fallback is recorded.
WeightedFit weighted_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                                   const Eigen::VectorXd& weight);

/// Non-negative least squares min ||A x - b||, x >= 0 (Lawson-Hanson).
Eigen::VectorXd nonnegative_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace augsurv
