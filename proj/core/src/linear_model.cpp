#include "augsurv/linear_model.hpp"

#include "augsurv/error.hpp"
#include "augsurv/least_squares.hpp"

namespace augsurv {

double LinearPredictor::predict(std::span<const double> x) const {
  double value = coefficients_[0];
  for (std::size_t j = 0; j < x.size(); ++j) value += coefficients_[static_cast<Eigen::Index>(j) + 1] * x[j];
  return value;
}

LearnerModel fit_linear(const RegressionProblem& problem) {
  problem.validate();
  if (problem.n() <= problem.p() + 1) throw Error("underdetermined");
  Eigen::MatrixXd design(problem.features.rows(), problem.features.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(problem.features.cols()) = problem.features;
  WeightedFit fit = weighted_least_squares(design, problem.response, problem.weight);
  std::vector<std::string> notes;
  if (fit.ridge_fallback) notes.emplace_back("linear: ridge fallback engaged");
  return LearnerModel(LearnerKind::linear, std::make_shared<LinearPredictor>(std::move(fit.coefficients)),
                      std::move(notes));
}

}  // namespace augsurv
