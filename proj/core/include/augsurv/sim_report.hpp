#pragma once

#include "augsurv/monte_carlo.hpp"
#include "augsurv/scenario.hpp"

#include <iosfwd>
#include <vector>

namespace augsurv {

/// Metrics of one (scenario, measure) simulation cell.
struct SimCell {
  ScenarioSpec scenario;
  double truth = 0.0;
  std::vector<SimMetrics> metrics;
};

/// Header: scenario,gamma,pi,n,measure,estimator,split,bias,sd,re,cp,n_reps,n_failures
void write_metrics_csv(std::ostream& out, const std::vector<SimCell>& cells);

/// Fixed-width table grouped by scenario and measure, one row per
/// estimator with and without splitting side by side.
void render_metrics_table(std::ostream& out, const std::vector<SimCell>& cells);

void write_replicate_log_csv(std::ostream& out, const ScenarioSpec& scenario,
                             const std::vector<ReplicateRecord>& log);

/// Splits a result into per-measure cells.
std::vector<SimCell> cells_from(const ScenarioSpec& scenario, const std::vector<MeasureTarget>& measures,
                                const MonteCarloResult& result);

}  // namespace augsurv
