#include "augsurv_cli/simulate.hpp"

#include "augsurv/error.hpp"
#include "augsurv/sim_report.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/program_options.hpp>

#include <fstream>
#include <sstream>
#include <ostream>

namespace augsurv::cli {
namespace {

namespace po = boost::program_options;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& text, F parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    try {
      out.push_back(parse(item));
    } catch (const std::exception& e) {
      throw Error("config key '" + key + "': " + e.what());
    }
  }
  return out;
}

double to_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error("'" + s + "' is not a number");
  return v;
}

std::size_t to_count(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size() || s.front() == '-') throw Error("'" + s + "' is not a count");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<EstimatorConfig> parse_estimator(const std::string& text, int k_folds) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string mode = colon == std::string::npos ? "both" : text.substr(colon + 1);
  const LearnerKind kind = parse_learner(name);
  const LearnerSpec learner =
      kind == LearnerKind::super_learner ? LearnerSpec::super_learner() : LearnerSpec::of(kind);
  EstimatorConfig plain{learner, false, k_folds};
  EstimatorConfig split{learner, true, k_folds};
  if (mode == "both") return {plain, split};
  if (mode == "split") return {split};
  if (mode == "nosplit") return {plain};
  throw Error("estimator '" + text + "': mode must be split, nosplit or both");
}

void SimulationConfig::validate() const {
  if (scenarios.empty()) throw Error("simulation config: no scenarios");
  if (gammas.empty()) throw Error("simulation config: no gamma values");
  if (pis.empty()) throw Error("simulation config: no pi values");
  if (sizes.empty()) throw Error("simulation config: no sample sizes");
  if (measures.empty()) throw Error("simulation config: empty measure list");
  if (reps < 2) throw Error("simulation config: reps must be at least 2");
  if (threads < 1) throw Error("simulation config: threads must be at least 1");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw Error("simulation config: ci_level must lie in (0, 1)");
  for (MeasureId m : measures) {
    if (m != MeasureId::log_hr && m != MeasureId::surv_diff && m != MeasureId::rmst_diff) {
      throw Error("simulation config: measure " + to_string(m) + " has no true-value oracle");
    }
  }
  for (double g : gammas) {
    for (double p : pis) {
      for (std::size_t n : sizes) {
        ScenarioSpec{Scenario::A, g, p, n, tau}.validate();
      }
    }
  }
  for (const auto& e : estimators) {
    if (e.split && e.k_folds < 2) throw Error("simulation config: k_folds must be at least 2");
  }
}

SimulationConfig parse_simulation_config(std::istream& in) {
  po::options_description keys;
  keys.add_options()
      ("scenarios", po::value<std::string>()->default_value("A"))
      ("gammas", po::value<std::string>()->default_value("0.5"))
      ("pi", po::value<std::string>()->default_value("0.5"))
      ("n", po::value<std::string>()->default_value("250"))
      ("measures", po::value<std::string>()->default_value(""))
      ("tau", po::value<double>()->default_value(2.0))
      ("estimators", po::value<std::string>()->default_value("linear"))
      ("k_folds", po::value<int>()->default_value(5))
      ("reps", po::value<std::size_t>()->default_value(2000))
      ("seed", po::value<std::uint64_t>()->default_value(1))
      ("threads", po::value<unsigned>()->default_value(1))
      ("ci_level", po::value<double>()->default_value(0.95))
      ("output_dir", po::value<std::string>()->default_value("sim_out"))
      ("replicate_log", po::value<bool>()->default_value(false))
      ("oracle_cox_n", po::value<std::size_t>()->default_value(1'000'000))
      ("oracle_draws", po::value<std::size_t>()->default_value(10'000'000))
      ("oracle_seed", po::value<std::uint64_t>()->default_value(20240917))
      ("oracle_cache", po::value<std::string>()->default_value(""));

  po::variables_map vm;
  try {
    po::store(po::parse_config_file(in, keys), vm);
    po::notify(vm);
  } catch (const po::error& e) {
    throw Error(std::string("simulation config: ") + e.what());
  }

  SimulationConfig c;
  c.scenarios = parse_list<Scenario>("scenarios", vm["scenarios"].as<std::string>(), parse_scenario);
  c.gammas = parse_list<double>("gammas", vm["gammas"].as<std::string>(), to_real);
  c.pis = parse_list<double>("pi", vm["pi"].as<std::string>(), to_real);
  c.sizes = parse_list<std::size_t>("n", vm["n"].as<std::string>(), to_count);
  c.measures = parse_list<MeasureId>("measures", vm["measures"].as<std::string>(), parse_measure);
  c.tau = vm["tau"].as<double>();
  const int k = vm["k_folds"].as<int>();
  for (const auto& item : split_list(vm["estimators"].as<std::string>())) {
    try {
      for (auto& e : parse_estimator(item, k)) c.estimators.push_back(std::move(e));
    } catch (const std::exception& e) {
      throw Error(std::string("config key 'estimators': ") + e.what());
    }
  }
  c.reps = vm["reps"].as<std::size_t>();
  c.seed = vm["seed"].as<std::uint64_t>();
  c.threads = vm["threads"].as<unsigned>();
  c.ci_level = vm["ci_level"].as<double>();
  c.output_dir = vm["output_dir"].as<std::string>();
  c.replicate_log = vm["replicate_log"].as<bool>();
  c.oracle.cox_sample_size = vm["oracle_cox_n"].as<std::size_t>();
  c.oracle.draws_per_arm = vm["oracle_draws"].as<std::size_t>();
  c.oracle.seed = vm["oracle_seed"].as<std::uint64_t>();
  const std::string cache = vm["oracle_cache"].as<std::string>();
  c.oracle.cache_dir = cache.empty() ? c.output_dir / "truth_cache" : std::filesystem::path(cache);
  c.validate();
  return c;
}

SimulationConfig read_simulation_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_simulation_config(in);
}

void run_simulation(const SimulationConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  std::vector<SimCell> cells;
  std::ofstream replicates;
  if (config.replicate_log) replicates.open(config.output_dir / "replicates.csv");
  bool log_header = true;

  for (Scenario s : config.scenarios) {
    for (double gamma : config.gammas) {
      for (double pi : config.pis) {
        for (std::size_t n : config.sizes) {
          const ScenarioSpec spec{s, gamma, pi, n, config.tau};
          std::vector<MeasureTarget> targets;
          for (MeasureId m : config.measures) {
            const double truth = true_value(spec, m, config.oracle).value;
            targets.push_back({EffectMeasureSpec::builtin(m, m == MeasureId::log_hr ? std::nullopt
                                                                                    : std::optional<double>(spec.tau)),
                               truth});
          }
          log << spec.label() << ": " << config.reps << " replicates" << std::endl;
          MonteCarloOptions options;
          options.n_reps = config.reps;
          options.master_seed = config.seed;
          options.threads = config.threads;
          options.ci_level = config.ci_level;
          const MonteCarloResult result = run_monte_carlo(spec, targets, config.estimators, options);
          for (const auto& m : result.metrics) {
            if (m.failure_flag) {
              log << "  WARNING: " << m.estimator_id << (m.split ? " (split)" : "") << " failed in "
                  << m.n_failures << " of " << config.reps << " replicates" << std::endl;
            }
          }
          for (auto& cell : cells_from(spec, targets, result)) cells.push_back(std::move(cell));
          if (config.replicate_log) {
            std::ostringstream block;
            write_replicate_log_csv(block, spec, result.log);
            std::string text = block.str();
            if (!log_header) text.erase(0, text.find('\n') + 1);
            replicates << text;
            log_header = false;
          }
        }
      }
    }
  }

  std::ofstream csv(config.output_dir / "metrics.csv");
  write_metrics_csv(csv, cells);
  std::ofstream table(config.output_dir / "metrics.txt");
  render_metrics_table(table, cells);
  log << "wrote " << (config.output_dir / "metrics.csv").string() << " and "
      << (config.output_dir / "metrics.txt").string() << std::endl;
}

}  // namespace augsurv::cli
