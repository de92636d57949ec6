#include "augsurv/super_learner.hpp"

#include "augsurv/error.hpp"
#include "augsurv/least_squares.hpp"
#include "augsurv/random.hpp"

#include <numeric>

namespace augsurv {
namespace {

class CombinedPredictor final : public Predictor {
 public:
  CombinedPredictor(std::vector<LearnerModel> members, std::vector<double> weights)
      : members_(std::move(members)), weights_(std::move(weights)) {}

  double predict(std::span<const double> x) const override {
    double value = 0.0;
    for (std::size_t k = 0; k < members_.size(); ++k) value += weights_[k] * members_[k].predict(x);
    return value;
  }

 private:
  std::vector<LearnerModel> members_;
  std::vector<double> weights_;
};

}  // namespace

LearnerModel SuperLearnerModel::as_model() const {
  std::vector<LearnerModel> members;
  std::vector<double> w;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (weights[static_cast<Eigen::Index>(k)] > 0.0) {
      members.push_back(candidates[k]);
      w.push_back(weights[static_cast<Eigen::Index>(k)]);
    }
  }
  return LearnerModel(LearnerKind::super_learner,
                      std::make_shared<CombinedPredictor>(std::move(members), std::move(w)), warnings);
}

std::vector<int> stratified_folds(std::span<const int> stratum, int v_folds, std::uint64_t seed) {
  if (v_folds < 2) throw Error("cross-validation needs at least two folds");
  std::vector<int> folds(stratum.size(), 0);
  Rng rng(seed);
  for (int level : {0, 1}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < stratum.size(); ++i) {
      if (stratum[i] == level) rows.push_back(i);
    }
    for (std::size_t k = rows.size(); k > 1; --k) std::swap(rows[k - 1], rows[uniform_index(rng, k)]);
    for (std::size_t k = 0; k < rows.size(); ++k) folds[rows[k]] = static_cast<int>(k % static_cast<std::size_t>(v_folds));
  }
  return folds;
}

SuperLearnerModel fit_super_learner(const RegressionProblem& problem, const std::vector<LearnerSpec>& candidates,
                                    int v_folds, std::uint64_t seed) {
  problem.validate();
  if (candidates.size() < 2) throw Error("super learner needs at least two candidates");
  if (problem.n() < 10 * static_cast<std::size_t>(v_folds)) throw Error("super learner needs n >= 10 * v_folds");
  for (const auto& c : candidates) {
    if (c.kind == LearnerKind::super_learner) throw Error("super learner candidates cannot be super learners");
  }

  const std::size_t n = problem.n();
  const std::size_t m = candidates.size();
  SuperLearnerModel model;
  model.folds = stratified_folds(problem.stratum, v_folds, derive_seed(seed, 0));

  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  std::vector<bool> alive(m, true);
  for (int v = 0; v < v_folds; ++v) {
    std::vector<std::size_t> train, held;
    for (std::size_t i = 0; i < n; ++i) (model.folds[i] == v ? held : train).push_back(i);
    const RegressionProblem train_problem = problem.subset(train);
    const RegressionProblem held_problem = problem.subset(held);
    for (std::size_t c = 0; c < m; ++c) {
      if (!alive[c]) continue;
      try {
        const LearnerModel fit = fit_learner(candidates[c], train_problem,
                                             derive_seed(seed, 1 + static_cast<std::uint64_t>(v) * m + c));
        const Eigen::VectorXd pred = fit.predict(held_problem.features);
        if (!pred.allFinite()) throw Error("non-finite predictions");
        for (std::size_t k = 0; k < held.size(); ++k) {
          z(static_cast<Eigen::Index>(held[k]), static_cast<Eigen::Index>(c)) = pred[static_cast<Eigen::Index>(k)];
        }
      } catch (const std::exception& e) {
        alive[c] = false;
        model.warnings.push_back("candidate " + candidates[c].label() + " dropped in fold " +
                                 std::to_string(v + 1) + ": " + e.what());
      }
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < m; ++c) {
    if (alive[c]) kept.push_back(c);
  }
  if (kept.empty()) throw Error("all super learner candidates failed");

  const auto k = static_cast<Eigen::Index>(kept.size());
  model.cv_predictions.resize(static_cast<Eigen::Index>(n), k);
  model.cv_risks.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    model.cv_predictions.col(c) = z.col(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(c)]));
    model.cv_risks[c] = problem.risk(model.cv_predictions.col(c));
  }
  Eigen::Index best = 0;
  model.cv_risks.minCoeff(&best);

  const Eigen::VectorXd root_w = problem.weight.array().sqrt();
  const Eigen::MatrixXd scaled = model.cv_predictions.array().colwise() * root_w.array();
  const Eigen::VectorXd target = problem.response.array() * root_w.array();
  Eigen::VectorXd alpha = nonnegative_least_squares(scaled, target);
  const double total = alpha.sum();
  bool use_vertex = !(total > 0.0);
  if (!use_vertex) {
    alpha /= total;
    const double combined = problem.risk(model.cv_predictions * alpha);
    if (combined > model.cv_risks[best]) {
      use_vertex = true;
      model.warnings.push_back("normalized NNLS combination lost to the best single candidate");
    }
  }
  if (use_vertex) alpha = Eigen::VectorXd::Unit(k, best);
  model.weights = alpha;
  model.combined_cv_risk = problem.risk(model.cv_predictions * alpha);

  for (Eigen::Index c = 0; c < k; ++c) {
    const std::size_t original = kept[static_cast<std::size_t>(c)];
    model.kinds.push_back(candidates[original].kind);
    model.candidates.push_back(
        fit_learner(candidates[original], problem, derive_seed(seed, 1000003 + original)));
  }
  return model;
}

}  // namespace augsurv
