#pragma once

#include "augsurv/dataset.hpp"
#include "augsurv/effect_measures.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace augsurv {

/// Weighted least-squares form of the empirical augmentation risk:
/// sum_i weight_i (response_i - b(W_i))^2 with response psi_i / (A_i - pi)
/// and weight (A_i - pi)^2 / n.
struct RegressionProblem {
  Eigen::MatrixXd features;
  Eigen::VectorXd response;
  Eigen::VectorXd weight;
  std::vector<std::size_t> subject_index;
  std::vector<int> stratum;  // treatment arm; cross-validation folds are stratified on it

  std::size_t n() const noexcept { return static_cast<std::size_t>(response.size()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(features.cols()); }

  RegressionProblem subset(std::span<const std::size_t> rows) const;

  /// sum_i weight_i (response_i - predictions_i)^2
  double risk(const Eigen::VectorXd& predictions) const;

  void validate() const;
};

RegressionProblem make_problem(const TrialDataset& data, std::span<const double> psi);
RegressionProblem make_problem(const TrialDataset& data, const InfluenceVector& psi);

}  // namespace augsurv
