#include "augsurv/learner.hpp"

#include "augsurv/error.hpp"
#include "augsurv/forest.hpp"
#include "augsurv/linear_model.hpp"
#include "augsurv/spline_model.hpp"
#include "augsurv/super_learner.hpp"
#include "augsurv/tree.hpp"

namespace augsurv {
namespace {

class ZeroPredictor final : public Predictor {
 public:
  double predict(std::span<const double>) const override { return 0.0; }
};

}  // namespace

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::zero: return "zero";
    case LearnerKind::linear: return "linear";
    case LearnerKind::spline_additive: return "spline_additive";
    case LearnerKind::tree: return "tree";
    case LearnerKind::random_forest: return "random_forest";
    case LearnerKind::super_learner: return "super_learner";
  }
  return "unknown";
}

LearnerKind parse_learner(const std::string& text) {
  std::string key = text;
  for (char& c : key) c = c == '-' ? '_' : c;
  if (key == "zero" || key == "none") return LearnerKind::zero;
  if (key == "linear" || key == "lm") return LearnerKind::linear;
  if (key == "spline" || key == "spline_additive" || key == "gam") return LearnerKind::spline_additive;
  if (key == "tree" || key == "rpart") return LearnerKind::tree;
  if (key == "forest" || key == "random_forest") return LearnerKind::random_forest;
  if (key == "super" || key == "super_learner" || key == "sl") return LearnerKind::super_learner;
  throw Error("unknown learner '" + text + "'");
}

LearnerSpec LearnerSpec::of(LearnerKind kind) {
  if (kind == LearnerKind::super_learner) return super_learner();
  LearnerSpec spec;
  spec.kind = kind;
  return spec;
}

std::vector<LearnerKind> LearnerSpec::default_candidates() {
  return {LearnerKind::linear, LearnerKind::spline_additive, LearnerKind::tree, LearnerKind::random_forest};
}

LearnerSpec LearnerSpec::super_learner(std::vector<LearnerKind> candidates) {
  LearnerSpec spec;
  spec.kind = LearnerKind::super_learner;
  spec.candidates = std::move(candidates);
  return spec;
}

LearnerSpec LearnerSpec::candidate(LearnerKind kind) const {
  LearnerSpec spec = *this;
  spec.kind = kind;
  spec.candidates.clear();
  return spec;
}

std::string LearnerSpec::label() const {
  switch (kind) {
    case LearnerKind::tree:
      return "tree(depth=" + std::to_string(tree.max_depth) + ")";
    case LearnerKind::random_forest:
      return "random_forest(trees=" + std::to_string(forest.n_trees) + ")";
    case LearnerKind::super_learner: {
      std::string out = "super_learner(";
      for (std::size_t k = 0; k < candidates.size(); ++k) out += (k ? "," : "") + to_string(candidates[k]);
      return out + ")";
    }
    default:
      return to_string(kind);
  }
}

LearnerModel::LearnerModel(LearnerKind kind, std::shared_ptr<const Predictor> predictor,
                           std::vector<std::string> notes)
    : kind_(kind), predictor_(std::move(predictor)), notes_(std::move(notes)) {
  if (!predictor_) throw Error("learner model without a predictor");
}

Eigen::VectorXd LearnerModel::predict(const Eigen::MatrixXd& features) const {
  Eigen::VectorXd out(features.rows());
  std::vector<double> row(static_cast<std::size_t>(features.cols()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) row[static_cast<std::size_t>(j)] = features(i, j);
    out[i] = predictor_->predict(row);
  }
  return out;
}

LearnerModel fit_zero(const RegressionProblem& problem) {
  problem.validate();
  return LearnerModel(LearnerKind::zero, std::make_shared<ZeroPredictor>());
}

LearnerModel fit_learner(const LearnerSpec& spec, const RegressionProblem& problem, std::uint64_t seed) {
  switch (spec.kind) {
    case LearnerKind::zero: return fit_zero(problem);
    case LearnerKind::linear: return fit_linear(problem);
    case LearnerKind::spline_additive: return fit_spline_additive(problem);
    case LearnerKind::tree: return fit_tree(problem, spec.tree);
    case LearnerKind::random_forest: return fit_random_forest(problem, spec.forest, seed);
    case LearnerKind::super_learner: {
      std::vector<LearnerSpec> members;
      for (LearnerKind kind : spec.candidates) members.push_back(spec.candidate(kind));
      return fit_super_learner(problem, members, spec.v_folds, seed).as_model();
    }
  }
  throw Error("unknown learner kind");
}

}  // namespace augsurv
