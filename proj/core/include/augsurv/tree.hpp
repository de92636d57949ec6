#pragma once

#include "augsurv/learner.hpp"
#include "augsurv/random.hpp"

#include <vector>

namespace augsurv {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // weighted mean of the node's responses
};

class RegressionTree final : public Predictor {
 public:
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}
  double predict(std::span<const double> x) const override;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const noexcept;
  int depth() const noexcept;

 private:
  std::vector<TreeNode> nodes_;
};

struct TreeGrowth {
  int max_depth = 4;  // 0 = unlimited
  double min_leaf_weight_fraction = 0.05;
  std::size_t mtry = 0;  // 0 = every column at every split
};

/// Greedy weighted-SSE CART on the given rows with per-row weights.
/// Candidate thresholds are midpoints between consecutive distinct values;
/// ties go to the lowest column index, then the smallest threshold. When
/// mtry > 0 each split considers an mtry-subset drawn from `rng`.
RegressionTree grow_tree(const Eigen::MatrixXd& features, const Eigen::VectorXd& response,
                         std::span<const double> row_weight, std::span<const std::size_t> rows,
                         const TreeGrowth& growth, Rng* rng = nullptr);

/// Requires n >= 20.
LearnerModel fit_tree(const RegressionProblem& problem, const TreeOptions& options = {});

}  // namespace augsurv
