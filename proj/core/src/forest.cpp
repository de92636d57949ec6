#include "augsurv/forest.hpp"

#include "augsurv/error.hpp"
#include "augsurv/random.hpp"

#include <algorithm>
#include <numeric>

namespace augsurv {

double ForestPredictor::predict(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(x);
  return sum / static_cast<double>(trees_.size());
}

LearnerModel fit_random_forest(const RegressionProblem& problem, const ForestOptions& options,
                               std::uint64_t seed) {
  problem.validate();
  if (problem.n() < 20) throw Error("random forest needs n >= 20");
  if (options.n_trees < 1) throw Error("random forest needs at least one tree");
  const std::size_t n = problem.n();
  const std::size_t p = problem.p();
  const std::size_t mtry =
      options.mtry > 0 ? static_cast<std::size_t>(options.mtry) : std::max<std::size_t>(1, (p + 2) / 3);
  const TreeGrowth growth{options.max_depth, options.min_leaf_weight_fraction, mtry};

  std::vector<RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(options.n_trees));
  std::vector<double> row_weight(n);
  std::vector<std::size_t> counts(n);
  std::vector<std::size_t> rows;
  for (int t = 0; t < options.n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    rows.clear();
    if (options.bootstrap) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t draw = 0; draw < n; ++draw) ++counts[uniform_index(rng, n)];
      for (std::size_t i = 0; i < n; ++i) {
        row_weight[i] = static_cast<double>(counts[i]) * problem.weight[static_cast<Eigen::Index>(i)];
        if (counts[i] > 0) rows.push_back(i);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        row_weight[i] = problem.weight[static_cast<Eigen::Index>(i)];
        rows.push_back(i);
      }
    }
    trees.push_back(grow_tree(problem.features, problem.response, row_weight, rows, growth, &rng));
  }
  return LearnerModel(LearnerKind::random_forest, std::make_shared<ForestPredictor>(std::move(trees)));
}

}  // namespace augsurv
