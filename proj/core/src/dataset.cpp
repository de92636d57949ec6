#include "augsurv/dataset.hpp"

#include "augsurv/error.hpp"

#include <cmath>
#include <utility>

namespace augsurv {

TrialDataset::TrialDataset(Eigen::MatrixXd covariates, std::vector<int> treatment,
                           std::vector<double> time, std::vector<int> event, double pi,
                           std::vector<std::string> covariate_names)
    : covariates_(std::move(covariates)),
      treatment_(std::move(treatment)),
      time_(std::move(time)),
      event_(std::move(event)),
      pi_(pi),
      names_(std::move(covariate_names)) {
  const std::size_t count = time_.size();
  if (count == 0) throw Error("empty sample");
  if (treatment_.size() != count || event_.size() != count ||
      static_cast<std::size_t>(covariates_.rows()) != count) {
    throw Error("dataset columns have inconsistent lengths");
  }
  if (!(pi_ > 0.0 && pi_ < 1.0)) throw Error("pi must lie strictly between 0 and 1");
  if (!names_.empty() && names_.size() != p()) throw Error("covariate name count does not match columns");
  if (names_.empty()) {
    for (std::size_t j = 0; j < p(); ++j) names_.push_back("W" + std::to_string(j + 1));
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!(std::isfinite(time_[i]) && time_[i] > 0.0)) {
      throw Error("time must be positive and finite (subject " + std::to_string(i) + ")");
    }
    if (treatment_[i] != 0 && treatment_[i] != 1) {
      throw Error("treatment must be 0 or 1 (subject " + std::to_string(i) + ")");
    }
    if (event_[i] != 0 && event_[i] != 1) {
      throw Error("event must be 0 or 1 (subject " + std::to_string(i) + ")");
    }
  }
  if (!covariates_.allFinite()) throw Error("covariates contain missing or non-finite values");
  if (arm_size(0) == 0 || arm_size(1) == 0) throw Error("both treatment arms must be non-empty");
  if (event_count(0) + event_count(1) == 0) throw Error("at least one event is required");
}

std::size_t TrialDataset::arm_size(int arm) const noexcept {
  std::size_t count = 0;
  for (int a : treatment_) count += (a == arm);
  return count;
}

std::size_t TrialDataset::event_count(int arm) const noexcept {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n(); ++i) count += (treatment_[i] == arm && event_[i] == 1);
  return count;
}

TrialDataset TrialDataset::subset(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()), covariates_.cols());
  std::vector<int> a(rows.size()), d(rows.size());
  std::vector<double> x(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t i = rows[k];
    if (i >= n()) throw Error("subset row out of range");
    w.row(static_cast<Eigen::Index>(k)) = covariates_.row(static_cast<Eigen::Index>(i));
    a[k] = treatment_[i];
    x[k] = time_[i];
    d[k] = event_[i];
  }
  return TrialDataset(std::move(w), std::move(a), std::move(x), std::move(d), pi_, names_);
}

TrialDataset TrialDataset::swap_arms() const {
  std::vector<int> flipped(treatment_.size());
  for (std::size_t i = 0; i < flipped.size(); ++i) flipped[i] = 1 - treatment_[i];
  return TrialDataset(covariates_, std::move(flipped), time_, event_, 1.0 - pi_, names_);
}

}  // namespace augsurv
