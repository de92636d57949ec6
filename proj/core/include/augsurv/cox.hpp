#pragma once

#include "augsurv/dataset.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace augsurv {

/// Unadjusted Cox fit with the treatment indicator as the only covariate
/// (Breslow ties). Besides the estimate it keeps the risk-set summaries at
/// the maximizer, so score residuals can be evaluated for subjects that were
/// not part of the fit.
class CoxFit {
 public:
  double log_hr() const noexcept { return log_hr_; }
  /// Observed information -d2 loglik / d beta2 at the maximizer (sum form).
  double information() const noexcept { return information_; }
  int iterations() const noexcept { return iterations_; }
  std::size_t sample_size() const noexcept { return sample_size_; }

  /// Lin-Wei score residuals of the fitted subjects, in input order.
  const std::vector<double>& score_residuals() const noexcept { return residuals_; }

  /// Score residual of an arbitrary subject against this fit's risk sets.
  double score_residual(const SubjectOutcome& subject) const;

  friend CoxFit cox_unadjusted(std::span<const double>, std::span<const int>, std::span<const int>);

 private:
  struct Curves {
    std::vector<double> event_times;  // distinct event times
    std::vector<double> cum_hazard0;  // sum_{t_j <= t} d_j / S0_j
    std::vector<double> cum_hazard1;  // sum_{t_j <= t} d_j p_j / S0_j
    std::vector<double> sorted_times; // training times, increasing
    std::vector<double> suffix_n1;    // #{arm 1 with X >= sorted_times[k]}
  };

  double mean_treatment_at(double t) const noexcept;

  double log_hr_ = 0.0;
  double information_ = 0.0;
  int iterations_ = 0;
  std::size_t sample_size_ = 0;
  std::vector<double> residuals_;
  Curves curves_;
};

CoxFit cox_unadjusted(std::span<const double> time, std::span<const int> event,
                      std::span<const int> treatment);
CoxFit cox_unadjusted(const TrialDataset& data);

/// Partial-likelihood score U(beta) evaluated from the definition.
double cox_score(std::span<const double> time, std::span<const int> event,
                 std::span<const int> treatment, double beta);

}  // namespace augsurv
