#pragma once

#include "augsurv/dataset.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace augsurv {

enum class MeasureId { log_hr, surv_diff, rmst_diff, mean_diff, custom };
enum class InfluenceMode { analytic, jackknife };

std::string to_string(MeasureId id);
/// Accepts both "rmst_diff" and "rmst-diff" spellings.
MeasureId parse_measure(const std::string& text);
bool measure_needs_tau(MeasureId id) noexcept;

using Estimator = std::function<double(const TrialDataset&)>;
/// Influence values for rows `rows` of `source`, with every nuisance quantity
/// estimated on `fitted`. In-sample use passes fitted == source, all rows.
using InfluenceFunction = std::function<std::vector<double>(
    const TrialDataset& fitted, const TrialDataset& source, std::span<const std::size_t> rows)>;

/// A treatment-effect measure: what to estimate and how its influence
/// function is obtained.
struct EffectMeasureSpec {
  MeasureId id = MeasureId::log_hr;
  std::optional<double> tau;
  InfluenceMode influence_mode = InfluenceMode::analytic;
  Estimator estimator;           // custom measures only
  InfluenceFunction influence;   // optional analytic influence for custom measures
  std::string name;

  static EffectMeasureSpec log_hr();
  static EffectMeasureSpec surv_diff(double tau);
  static EffectMeasureSpec rmst_diff(double tau);
  static EffectMeasureSpec mean_diff();
  static EffectMeasureSpec custom(std::string name, Estimator estimator,
                                  InfluenceFunction influence = {});
  static EffectMeasureSpec builtin(MeasureId id, std::optional<double> tau);

  void validate() const;
  std::string label() const;
};

struct InfluenceVector {
  std::vector<double> values;
  MeasureId measure = MeasureId::log_hr;
  InfluenceMode provenance = InfluenceMode::analytic;

  /// (1/n^2) sum psi_i^2: the variance estimate of the initial estimator.
  double variance_estimate() const;
};

double estimate(const EffectMeasureSpec& spec, const TrialDataset& data);

InfluenceVector analytic_influence(const EffectMeasureSpec& spec, const TrialDataset& data);

/// psi_i = (n - 1)(theta - theta_(-i)), then mean-centered.
InfluenceVector jackknife_influence(const EffectMeasureSpec& spec, const TrialDataset& data);

/// Dispatches on spec.influence_mode.
InfluenceVector estimate_influence(const EffectMeasureSpec& spec, const TrialDataset& data);

/// Influence of the measure estimated on `fitted`, evaluated at rows `rows`
/// of `source` (cross-fitting). Analytic mode plugs the fitted nuisance
/// curves into the influence expression; jackknife mode uses the add-one
/// perturbation n_fit * (theta(fitted + i) - theta(fitted)).
std::vector<double> influence_out_of_sample(const EffectMeasureSpec& spec, const TrialDataset& fitted,
                                            const TrialDataset& source, std::span<const std::size_t> rows);

}  // namespace augsurv
