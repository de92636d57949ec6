#include "augsurv/error.hpp"
#include "augsurv_cli/analysis.hpp"
#include "augsurv_cli/simulate.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace augsurv;
using namespace augsurv::cli;

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const auto end = item.find(',', start);
      const std::string part = item.substr(start, end == std::string::npos ? std::string::npos : end - start);
      if (!part.empty()) out.push_back(part);
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariate-adjusted treatment effects for randomized trials with survival endpoints"};
  app.require_subcommand(1);

  AnalysisConfig cfg;
  std::string input, measure = "log-hr", learner = "linear", missing = "median-impute";
  std::vector<std::string> cont, cat, candidates;
  double tau = 0.0;

  auto* analyze_cmd = app.add_subcommand("analyze", "Unadjusted and augmented estimates from a CSV file");
  analyze_cmd->add_option("--input", input, "CSV file with a header row")->required();
  analyze_cmd->add_option("--time", cfg.time_column, "Follow-up time column")->required();
  analyze_cmd->add_option("--event", cfg.event_column, "Event indicator column (1 = event)")->required();
  analyze_cmd->add_option("--trt", cfg.treatment_column, "Treatment column (0/1)")->required();
  analyze_cmd->add_option("--cont", cont, "Continuous covariates, comma-separated");
  analyze_cmd->add_option("--cat", cat, "Categorical covariates, comma-separated");
  analyze_cmd->add_option("--pi", cfg.pi, "Randomization probability of treatment")->capture_default_str();
  analyze_cmd->add_option("--measure", measure, "log-hr, surv-diff, rmst-diff or mean-diff")->capture_default_str();
  auto* tau_opt = analyze_cmd->add_option("--tau", tau, "Time horizon for surv-diff and rmst-diff");
  analyze_cmd->add_option("--learner", learner, "linear, spline, tree, forest or super")->capture_default_str();
  analyze_cmd->add_option("--candidates", candidates, "Super learner candidates, comma-separated");
  analyze_cmd->add_option("--k-folds", cfg.k_folds, "Cross-fitting folds; 0 disables splitting")
      ->capture_default_str();
  analyze_cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  analyze_cmd->add_option("--missing", missing, "fail or median-impute")->capture_default_str();
  analyze_cmd->add_option("--ci-level", cfg.ci_level, "Confidence level")->capture_default_str();

  std::string config_path;
  unsigned threads = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo evaluation driven by a config file");
  simulate_cmd->add_option("config", config_path, "key = value config file")->required();
  simulate_cmd->add_option("--threads", threads, "Worker threads (overrides the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze_cmd) {
      cfg.input = input;
      cfg.continuous = split_commas(cont);
      cfg.categorical = split_commas(cat);
      cfg.measure = parse_measure(measure);
      if (tau_opt->count() > 0) cfg.tau = tau;
      cfg.learner = parse_learner(learner);
      for (const auto& c : split_commas(candidates)) cfg.candidates.push_back(parse_learner(c));
      cfg.missing = parse_missing_policy(missing);
      cfg.validate();

      const IngestResult ingested = ingest_csv(cfg);
      for (const auto& m : ingested.messages) std::cerr << "note: " << m << '\n';
      const AnalysisResult result = analyze(ingested.data, cfg);
      std::cout << "n = " << ingested.data.n() << ", events = "
                << ingested.data.event_count(0) + ingested.data.event_count(1) << ", measure = "
                << cfg.measure_spec().label() << ", learner = " << cfg.learner_spec().label() << ", "
                << (cfg.k_folds == 0 ? std::string("no sample splitting")
                                     : std::to_string(cfg.k_folds) + "-fold cross-fitting")
                << ", seed = " << cfg.seed << "\n\n";
      render_analysis(std::cout, result);
      for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
    } else if (*simulate_cmd) {
      SimulationConfig sim = read_simulation_config(config_path);
      if (threads > 0) sim.threads = threads;
      run_simulation(sim, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
