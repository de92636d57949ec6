#include "augsurv/least_squares.hpp"

#include "augsurv/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace augsurv {

WeightedFit weighted_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                                   const Eigen::VectorXd& weight) {
  const Eigen::MatrixXd weighted = design.array().colwise() * weight.array();
  Eigen::MatrixXd gram = design.transpose() * weighted;
  Eigen::VectorXd rhs = weighted.transpose() * response;

  // Jacobi scaling: solve for D^{-1} beta with D = diag(gram)^{-1/2}.
  Eigen::VectorXd scale(gram.rows());
  for (Eigen::Index j = 0; j < gram.rows(); ++j) {
    const double d = gram(j, j);
    scale[j] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
  }
  gram = scale.asDiagonal() * gram * scale.asDiagonal();
  rhs = scale.asDiagonal() * rhs;

  WeightedFit fit;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const double largest = gram.diagonal().cwiseAbs().maxCoeff();
  const double smallest_pivot = ldlt.vectorD().cwiseAbs().minCoeff();
  if (ldlt.info() != Eigen::Success || !(largest > 0.0) || smallest_pivot < 1e-10 * largest) {
    const double ridge = 1e-8 * gram.trace() / static_cast<double>(gram.rows());
    gram.diagonal().array() += ridge > 0.0 ? ridge : 1e-8;
    ldlt.compute(gram);
    fit.ridge_fallback = true;
  }
  fit.coefficients = scale.asDiagonal() * ldlt.solve(rhs);
  if (!fit.coefficients.allFinite()) throw Error("weighted least squares failed");
  return fit;
}

Eigen::VectorXd nonnegative_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index m = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * a.norm() * b.norm() *
                     static_cast<double>(std::max(a.rows(), m));

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    const Eigen::VectorXd coef = sub.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = coef[static_cast<Eigen::Index>(k)];
    return z;
  };

  for (int outer = 0; outer < 3 * static_cast<int>(m) + 10; ++outer) {
    const Eigen::VectorXd gradient = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_value = tol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && gradient[j] > best_value) {
        best_value = gradient[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner < 3 * static_cast<int>(m) + 10; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      bool feasible = true;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          feasible = false;
          alpha = std::min(alpha, x[j] / (x[j] - z[j]));
        }
      }
      if (feasible) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  return x.cwiseMax(0.0);
}

}  // namespace augsurv
