#pragma once

#include "augsurv/effect_measures.hpp"
#include "augsurv/learner.hpp"
#include "augsurv/scenario.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace augsurv {

/// One augmented estimator in a simulation cell. The unadjusted estimator
/// is always evaluated and needs no config.
struct EstimatorConfig {
  LearnerSpec learner;
  bool split = true;
  int k_folds = 5;

  std::string label() const;
};

struct MeasureTarget {
  EffectMeasureSpec spec;
  double truth = 0.0;
};

struct SimMetrics {
  std::string estimator_id;  // "unadjusted" or the learner label
  MeasureId measure = MeasureId::log_hr;
  bool split = false;
  double bias = 0.0;
  double sd = 0.0;
  double re = 0.0;
  double cp = 0.0;
  double mean_se = 0.0;
  std::size_t n_reps = 0;
  std::size_t n_failures = 0;
  bool failure_flag = false;  // failures above 1% of replicates
};

struct ReplicateRecord {
  std::size_t replicate = 0;
  MeasureId measure = MeasureId::log_hr;
  std::string estimator_id;
  bool split = false;
  bool failed = false;
  double estimate = 0.0;
  double se = 0.0;
  std::string error;
};

struct MonteCarloOptions {
  std::size_t n_reps = 2000;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  double ci_level = 0.95;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct MonteCarloResult {
  std::vector<SimMetrics> metrics;     // per measure: unadjusted first, then configs in order
  std::vector<ReplicateRecord> log;    // replicate-major, same order within a replicate
};

/// Replicate r draws its trial and all estimator randomness from
/// derive_seed(master_seed, r), so results do not depend on `threads`.
/// A failing estimator is dropped from that replicate only.
MonteCarloResult run_monte_carlo(const ScenarioSpec& scenario, const std::vector<MeasureTarget>& measures,
                                 const std::vector<EstimatorConfig>& estimators, const MonteCarloOptions& options);

/// Bias, SD, coverage and mean SE of replicate estimates against `truth`.
/// `re` is left at 0; the caller divides by the unadjusted variance.
SimMetrics summarize(const std::vector<ReplicateRecord>& records, double truth, double ci_level);

}  // namespace augsurv
