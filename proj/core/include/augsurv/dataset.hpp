#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace augsurv {

/// Per-subject trial records (W, A, X, Delta) together with the design
/// randomization probability pi = P(A = 1).
///
/// Construction validates every invariant; a constructed dataset is
/// immutable and may be shared freely across threads.
class TrialDataset {
 public:
  TrialDataset(Eigen::MatrixXd covariates, std::vector<int> treatment, std::vector<double> time,
               std::vector<int> event, double pi, std::vector<std::string> covariate_names = {});

  std::size_t n() const noexcept { return time_.size(); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(covariates_.cols()); }
  double pi() const noexcept { return pi_; }

  const Eigen::MatrixXd& covariates() const noexcept { return covariates_; }
  std::span<const int> treatment() const noexcept { return treatment_; }
  std::span<const double> time() const noexcept { return time_; }
  std::span<const int> event() const noexcept { return event_; }
  const std::vector<std::string>& covariate_names() const noexcept { return names_; }

  std::size_t arm_size(int arm) const noexcept;
  std::size_t event_count(int arm) const noexcept;

  /// Rows in the given order (duplicates allowed). The result is validated
  /// like any other dataset, so a subset lacking an arm or an event throws.
  TrialDataset subset(std::span<const std::size_t> rows) const;

  /// Same subjects with A replaced by 1 - A and pi by 1 - pi.
  TrialDataset swap_arms() const;

 private:
  Eigen::MatrixXd covariates_;
  std::vector<int> treatment_;
  std::vector<double> time_;
  std::vector<int> event_;
  double pi_;
  std::vector<std::string> names_;
};

/// Row view of one subject's outcome data, used when nuisance fits from one
/// sample are evaluated at subjects of another.
struct SubjectOutcome {
  int treatment;
  double time;
  int event;
};

inline SubjectOutcome outcome_of(const TrialDataset& data, std::size_t i) {
  return {data.treatment()[i], data.time()[i], data.event()[i]};
}

}  // namespace augsurv
