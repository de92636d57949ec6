#include "augsurv/tree.hpp"

#include "augsurv/error.hpp"

#include <algorithm>
#include <numeric>

namespace augsurv {

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t node = 0;
  while (nodes_[node].feature >= 0) {
    const TreeNode& current = nodes_[node];
    node = static_cast<std::size_t>(x[static_cast<std::size_t>(current.feature)] <= current.threshold
                                        ? current.left
                                        : current.right);
  }
  return nodes_[node].value;
}

std::size_t RegressionTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

int RegressionTree::depth() const noexcept {
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    deepest = std::max(deepest, level[k]);
    if (nodes_[k].feature >= 0) {
      level[static_cast<std::size_t>(nodes_[k].left)] = level[k] + 1;
      level[static_cast<std::size_t>(nodes_[k].right)] = level[k] + 1;
    }
  }
  return deepest;
}

namespace {

// Every feature keeps its own ordering of the node's rows; a node is the
// same index range [begin, end) in each ordering. Splitting partitions each
// range stably, so orderings stay sorted without re-sorting.
class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& z, std::span<const double> w,
              std::span<const std::size_t> rows, const TreeGrowth& growth, double min_leaf_weight, Rng* rng)
      : x_(x), z_(z), w_(w), growth_(growth), min_leaf_(min_leaf_weight), rng_(rng) {
    const auto p = static_cast<std::size_t>(x.cols());
    columns_.resize(p);
    std::iota(columns_.begin(), columns_.end(), std::size_t{0});
    std::vector<std::size_t> base(rows.begin(), rows.end());
    std::sort(base.begin(), base.end());
    order_.assign(std::max<std::size_t>(p, 1), base);
    for (std::size_t f = 0; f < p; ++f) {
      const auto col = static_cast<Eigen::Index>(f);
      std::stable_sort(order_[f].begin(), order_[f].end(), [&](std::size_t a, std::size_t b) {
        return x_(static_cast<Eigen::Index>(a), col) < x_(static_cast<Eigen::Index>(b), col);
      });
    }
    scratch_.resize(base.size());
    if (!base.empty()) goes_left_.assign(base.back() + 1, 0);
  }

  int build(std::size_t begin, std::size_t end, int depth) {
    double total_w = 0.0, total_s = 0.0, total_q = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t i = order_[0][k];
      const double wz = w_[i] * z_[static_cast<Eigen::Index>(i)];
      total_w += w_[i];
      total_s += wz;
      total_q += wz * z_[static_cast<Eigen::Index>(i)];
    }
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, total_s / total_w});

    if (growth_.max_depth > 0 && depth >= growth_.max_depth) return index;
    if (total_w < 2.0 * min_leaf_ || end - begin < 2) return index;

    const std::vector<std::size_t> candidates = draw_columns();
    const double parent_term = total_s * total_s / total_w;
    double best_gain = 1e-12 * total_q;
    int best_feature = -1;
    double best_threshold = 0.0;

    for (std::size_t feature : candidates) {
      const auto col = static_cast<Eigen::Index>(feature);
      const std::vector<std::size_t>& sorted = order_[feature];
      double left_w = 0.0, left_s = 0.0;
      for (std::size_t k = begin; k + 1 < end; ++k) {
        const std::size_t i = sorted[k];
        left_w += w_[i];
        left_s += w_[i] * z_[static_cast<Eigen::Index>(i)];
        const double here = x_(static_cast<Eigen::Index>(i), col);
        const double next = x_(static_cast<Eigen::Index>(sorted[k + 1]), col);
        if (!(next > here)) continue;
        const double right_w = total_w - left_w;
        if (left_w < min_leaf_ || right_w < min_leaf_) continue;
        const double right_s = total_s - left_s;
        const double gain = left_s * left_s / left_w + right_s * right_s / right_w - parent_term;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(feature);
          best_threshold = 0.5 * (here + next);
        }
      }
    }
    if (best_feature < 0) return index;

    std::size_t n_left = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t i = order_[0][k];
      const bool left = x_(static_cast<Eigen::Index>(i), best_feature) <= best_threshold;
      goes_left_[i] = left;
      n_left += left;
    }
    for (auto& ordering : order_) partition(ordering, begin, end);
    const int left = build(begin, begin + n_left, depth + 1);
    const int right = build(begin + n_left, end, depth + 1);
    nodes_[static_cast<std::size_t>(index)].feature = best_feature;
    nodes_[static_cast<std::size_t>(index)].threshold = best_threshold;
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
  }

  std::size_t size() const noexcept { return scratch_.size(); }
  std::vector<TreeNode> release() { return std::move(nodes_); }

 private:
  // Stable: left rows first, then right rows, each in their previous order.
  void partition(std::vector<std::size_t>& ordering, std::size_t begin, std::size_t end) {
    std::size_t out = begin, spill = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t i = ordering[k];
      if (goes_left_[i]) {
        ordering[out++] = i;
      } else {
        scratch_[spill++] = i;
      }
    }
    std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(spill),
              ordering.begin() + static_cast<std::ptrdiff_t>(out));
  }

  std::vector<std::size_t> draw_columns() {
    const std::size_t p = columns_.size();
    if (growth_.mtry == 0 || growth_.mtry >= p || rng_ == nullptr) return columns_;
    std::vector<std::size_t> pool = columns_;
    for (std::size_t k = 0; k < growth_.mtry; ++k) {
      std::swap(pool[k], pool[k + uniform_index(*rng_, p - k)]);
    }
    pool.resize(growth_.mtry);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& z_;
  std::span<const double> w_;
  TreeGrowth growth_;
  double min_leaf_;
  Rng* rng_;
  std::vector<std::size_t> columns_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::size_t> scratch_;
  std::vector<char> goes_left_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RegressionTree grow_tree(const Eigen::MatrixXd& features, const Eigen::VectorXd& response,
                         std::span<const double> row_weight, std::span<const std::size_t> rows,
                         const TreeGrowth& growth, Rng* rng) {
  if (rows.empty()) throw Error("cannot grow a tree on zero rows");
  double total = 0.0;
  for (std::size_t i : rows) total += row_weight[i];
  // A hair below the nominal fraction so exact-boundary splits survive rounding.
  const double min_leaf = growth.min_leaf_weight_fraction * total * (1.0 - 1e-12);
  TreeBuilder builder(features, response, row_weight, rows, growth, min_leaf, rng);
  builder.build(0, builder.size(), 0);
  return RegressionTree(builder.release());
}

LearnerModel fit_tree(const RegressionProblem& problem, const TreeOptions& options) {
  problem.validate();
  if (problem.n() < 20) throw Error("regression tree needs n >= 20");
  std::vector<std::size_t> rows(problem.n());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const TreeGrowth growth{options.max_depth, options.min_leaf_weight_fraction, 0};
  auto tree = std::make_shared<RegressionTree>(grow_tree(
      problem.features, problem.response, std::span<const double>(problem.weight.data(), problem.n()), rows,
      growth));
  return LearnerModel(LearnerKind::tree, std::move(tree));
}

}  // namespace augsurv
