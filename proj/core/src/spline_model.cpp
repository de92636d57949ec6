#include "augsurv/spline_model.hpp"

#include "augsurv/error.hpp"
#include "augsurv/least_squares.hpp"

#include <algorithm>
#include <numeric>

namespace augsurv {

NaturalSplineBasis::NaturalSplineBasis(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() >= 3) {
    const double range = knots_.back() - knots_.front();
    scale_ = 1.0 / (range * range);
  }
}

double NaturalSplineBasis::truncated(double x, std::size_t k) const {
  const double last = knots_.back();
  const auto cube = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
  return (cube(x - knots_[k]) - cube(x - last)) / (last - knots_[k]);
}

void NaturalSplineBasis::evaluate(double x, double* out) const {
  out[0] = x;
  if (knots_.size() < 3) return;
  const std::size_t m = knots_.size();
  const double tail = truncated(x, m - 2);
  for (std::size_t k = 0; k + 2 < m; ++k) out[k + 1] = scale_ * (truncated(x, k) - tail);
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double cumulative = 0.0;
  for (std::size_t i : order) {
    cumulative += weights[i];
    if (cumulative >= q * total) return values[i];
  }
  return values[order.back()];
}

AdditiveSplinePredictor::AdditiveSplinePredictor(std::vector<NaturalSplineBasis> bases,
                                                 Eigen::VectorXd coefficients)
    : bases_(std::move(bases)), coefficients_(std::move(coefficients)) {}

double AdditiveSplinePredictor::predict(std::span<const double> x) const {
  double value = coefficients_[0];
  Eigen::Index offset = 1;
  double buffer[8];
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    bases_[j].evaluate(x[j], buffer);
    for (std::size_t k = 0; k < bases_[j].size(); ++k) value += coefficients_[offset++] * buffer[k];
  }
  return value;
}

LearnerModel fit_spline_additive(const RegressionProblem& problem) {
  problem.validate();
  if (problem.n() < 10 * problem.p()) throw Error("spline additive model needs n >= 10 p");

  const std::span<const double> weights(problem.weight.data(), problem.n());
  std::vector<NaturalSplineBasis> bases;
  std::size_t width = 1;
  for (Eigen::Index j = 0; j < problem.features.cols(); ++j) {
    const Eigen::VectorXd column = problem.features.col(j);
    const std::span<const double> values(column.data(), problem.n());
    std::vector<double> distinct(values.begin(), values.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> knots;
    if (distinct.size() > 2) {
      knots = {distinct.front(), weighted_quantile(values, weights, 0.25),
               weighted_quantile(values, weights, 0.5), weighted_quantile(values, weights, 0.75),
               distinct.back()};
      std::sort(knots.begin(), knots.end());
      knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    }
    bases.emplace_back(std::move(knots));
    width += bases.back().size();
  }
  if (problem.n() <= width) throw Error("underdetermined");

  Eigen::MatrixXd design(problem.features.rows(), static_cast<Eigen::Index>(width));
  double buffer[8];
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    design(i, 0) = 1.0;
    Eigen::Index offset = 1;
    for (std::size_t j = 0; j < bases.size(); ++j) {
      bases[j].evaluate(problem.features(i, static_cast<Eigen::Index>(j)), buffer);
      for (std::size_t k = 0; k < bases[j].size(); ++k) design(i, offset++) = buffer[k];
    }
  }
  WeightedFit fit = weighted_least_squares(design, problem.response, problem.weight);
  std::vector<std::string> notes;
  if (fit.ridge_fallback) notes.emplace_back("spline_additive: ridge fallback engaged");
  return LearnerModel(LearnerKind::spline_additive,
                      std::make_shared<AdditiveSplinePredictor>(std::move(bases), std::move(fit.coefficients)),
                      std::move(notes));
}

}  // namespace augsurv
