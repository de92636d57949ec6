#pragma once

#include "augsurv/monte_carlo.hpp"
#include "augsurv/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace augsurv::cli {

/// Simulation grid read from a key = value file. List values are
/// comma-separated; '#' starts a comment.
///
///   scenarios = A,B,C,D        gammas = 0.5       pi = 0.5      n = 250
///   measures = log_hr,rmst_diff                   tau = 2
///   estimators = linear:both,forest:split         k_folds = 5
///   reps = 2000   seed = 1   threads = 1   output_dir = sim_out
///
/// An estimator is a learner name with an optional ":split", ":nosplit"
/// or ":both" (default).
struct SimulationConfig {
  std::vector<Scenario> scenarios;
  std::vector<double> gammas;
  std::vector<double> pis;
  std::vector<std::size_t> sizes;
  std::vector<MeasureId> measures;
  double tau = 2.0;
  std::vector<EstimatorConfig> estimators;
  std::size_t reps = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double ci_level = 0.95;
  std::filesystem::path output_dir = "sim_out";
  bool replicate_log = false;
  OracleOptions oracle;

  void validate() const;
};

SimulationConfig parse_simulation_config(std::istream& in);
SimulationConfig read_simulation_config(const std::filesystem::path& path);

/// Parses "linear", "forest:split", "super:both" and similar.
std::vector<EstimatorConfig> parse_estimator(const std::string& text, int k_folds);

/// Runs every grid cell and writes metrics.csv, metrics.txt and, when
/// requested, replicates.csv into output_dir. Progress goes to `log`.
void run_simulation(const SimulationConfig& config, std::ostream& log);

}  // namespace augsurv::cli
