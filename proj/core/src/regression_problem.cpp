#include "augsurv/regression_problem.hpp"

#include "augsurv/error.hpp"

#include <numeric>

namespace augsurv {

RegressionProblem RegressionProblem::subset(std::span<const std::size_t> rows) const {
  RegressionProblem out;
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.features.resize(m, features.cols());
  out.response.resize(m);
  out.weight.resize(m);
  out.subject_index.resize(rows.size());
  out.stratum.resize(rows.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto i = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(k)]);
    if (i < 0 || i >= response.size()) throw Error("problem subset row out of range");
    out.features.row(k) = features.row(i);
    out.response[k] = response[i];
    out.weight[k] = weight[i];
    out.subject_index[static_cast<std::size_t>(k)] = subject_index[static_cast<std::size_t>(i)];
    out.stratum[static_cast<std::size_t>(k)] = stratum[static_cast<std::size_t>(i)];
  }
  return out;
}

double RegressionProblem::risk(const Eigen::VectorXd& predictions) const {
  return (weight.array() * (response - predictions).array().square()).sum();
}

void RegressionProblem::validate() const {
  const auto n = response.size();
  if (n == 0) throw Error("empty regression problem");
  if (features.rows() != n || weight.size() != n ||
      subject_index.size() != static_cast<std::size_t>(n) ||
      stratum.size() != static_cast<std::size_t>(n)) {
    throw Error("regression problem has inconsistent sizes");
  }
  if (!(weight.array() > 0.0).all()) throw Error("regression weights must be strictly positive");
  if (!response.allFinite() || !features.allFinite()) throw Error("regression problem has non-finite values");
}

RegressionProblem make_problem(const TrialDataset& data, std::span<const double> psi) {
  if (psi.size() != data.n()) throw Error("influence vector length does not match the dataset");
  const auto n = static_cast<Eigen::Index>(data.n());
  const double pi = data.pi();
  RegressionProblem problem;
  problem.features = data.covariates();
  problem.response.resize(n);
  problem.weight.resize(n);
  problem.subject_index.resize(data.n());
  std::iota(problem.subject_index.begin(), problem.subject_index.end(), std::size_t{0});
  problem.stratum.assign(data.treatment().begin(), data.treatment().end());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double centered = data.treatment()[static_cast<std::size_t>(i)] - pi;
    problem.response[i] = psi[static_cast<std::size_t>(i)] / centered;
    problem.weight[i] = centered * centered / static_cast<double>(n);
  }
  return problem;
}

RegressionProblem make_problem(const TrialDataset& data, const InfluenceVector& psi) {
  return make_problem(data, std::span<const double>(psi.values));
}

}  // namespace augsurv
