#include "augsurv/scenario.hpp"

#include "augsurv/cox.hpp"
#include "augsurv/error.hpp"
#include "augsurv/random.hpp"

#include <boost/random/normal_distribution.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace augsurv {
namespace {

const double kGamma43 = std::tgamma(4.0 / 3.0);

double log_mean_time(Scenario scenario, double gamma, std::span<const double> w, int a) {
  const double w1 = w[0], w2 = w[1], w3 = w[2];
  const double ad = static_cast<double>(a);
  double eta = gamma * ad + w1 + w2 - ad * w2 - ad * w3;
  switch (scenario) {
    case Scenario::A: break;
    case Scenario::B: eta += w2 * w3; break;
    case Scenario::C: eta += 1.0 - w1 * w1; break;
    case Scenario::D: eta += 1.0 - w1 * w1 + w2 * w3; break;
  }
  return eta;
}

// Inverse-CDF Weibull draw; exp(eta) is the scale since mean = scale * Gamma(4/3).
double draw_time(Rng& rng, double scale) {
  const double u = uniform01(rng);
  return scale * std::cbrt(-std::log1p(-u));
}

std::string cache_name(const ScenarioSpec& spec, MeasureId measure, const OracleOptions& options) {
  std::ostringstream os;
  os.precision(17);
  os << "truth_" << to_string(spec.scenario) << "_g" << spec.gamma << '_' << to_string(measure);
  if (measure == MeasureId::log_hr) {
    os << "_pi" << spec.pi << "_n" << options.cox_sample_size;
  } else {
    os << "_tau" << spec.tau << "_m" << options.draws_per_arm;
  }
  os << "_s" << options.seed << ".txt";
  return os.str();
}

std::optional<TrueValue> read_cache(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  TrueValue v;
  std::string key;
  if (!(in >> key >> v.value) || key != "value") return std::nullopt;
  if (!(in >> key >> v.mc_se) || key != "mc_se") return std::nullopt;
  return v;
}

void write_cache(const std::filesystem::path& file, const TrueValue& v) {
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out.precision(17);
    out << "value " << v.value << "\nmc_se " << v.mc_se << '\n';
  }
  std::filesystem::rename(tmp, file);
}

TrueValue arm_difference_truth(const ScenarioSpec& spec, MeasureId measure, const OracleOptions& options) {
  const std::size_t m = options.draws_per_arm;
  if (m < 2) throw Error("oracle needs at least two draws per arm");
  std::array<double, 2> mean{}, var{};
  for (int arm = 0; arm < 2; ++arm) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(arm)));
    boost::random::normal_distribution<double> normal;
    double sum = 0.0, sum_sq = 0.0;
    std::array<double, 3> w{};
    for (std::size_t i = 0; i < m; ++i) {
      for (auto& x : w) x = normal(rng);
      const double t = draw_time(rng, std::exp(log_mean_time(spec.scenario, spec.gamma, w, arm)));
      const double y = measure == MeasureId::surv_diff ? (t > spec.tau ? 1.0 : 0.0) : std::min(t, spec.tau);
      sum += y;
      sum_sq += y * y;
    }
    const double md = static_cast<double>(m);
    mean[static_cast<std::size_t>(arm)] = sum / md;
    var[static_cast<std::size_t>(arm)] = (sum_sq - sum * sum / md) / (md - 1.0);
  }
  const double md = static_cast<double>(m);
  return {mean[1] - mean[0], std::sqrt(var[0] / md + var[1] / md)};
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
    case Scenario::D: return "D";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text) {
  if (text == "A" || text == "a") return Scenario::A;
  if (text == "B" || text == "b") return Scenario::B;
  if (text == "C" || text == "c") return Scenario::C;
  if (text == "D" || text == "d") return Scenario::D;
  throw Error("unknown scenario '" + text + "'");
}

void ScenarioSpec::validate() const {
  if (!std::isfinite(gamma)) throw Error("gamma must be finite");
  if (!(pi > 0.0 && pi < 1.0)) throw Error("pi must lie in (0, 1)");
  if (n < 2) throw Error("scenario sample size must be at least 2");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("tau must be positive");
  if (!(censor_low >= 0.0 && censor_high > censor_low) || !std::isfinite(censor_high)) {
    throw Error("censoring interval must satisfy 0 <= low < high");
  }
}

std::string ScenarioSpec::label() const {
  std::ostringstream os;
  os << "scenario " << to_string(scenario) << ", gamma=" << gamma << ", pi=" << pi << ", n=" << n;
  return os.str();
}

double sample_event_time(Rng& rng, Scenario scenario, double gamma, std::span<const double> w, int a) {
  if (w.size() != static_cast<std::size_t>(kScenarioCovariates)) throw Error("scenario needs three covariates");
  return draw_time(rng, std::exp(log_mean_time(scenario, gamma, w, a)));
}

double conditional_mean_time(Scenario scenario, double gamma, std::span<const double> w, int a) {
  if (w.size() != static_cast<std::size_t>(kScenarioCovariates)) throw Error("scenario needs three covariates");
  return kGamma43 * std::exp(log_mean_time(scenario, gamma, w, a));
}

TrialDataset generate_trial(const ScenarioSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = spec.n;
  Rng rng(seed);
  boost::random::normal_distribution<double> normal;
  Eigen::MatrixXd w(static_cast<Eigen::Index>(n), kScenarioCovariates);
  std::vector<int> a(n), event(n);
  std::vector<double> x(n);
  std::array<double, 3> wi{};
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < kScenarioCovariates; ++j) {
      wi[static_cast<std::size_t>(j)] = normal(rng);
      w(static_cast<Eigen::Index>(i), j) = wi[static_cast<std::size_t>(j)];
    }
    a[i] = uniform01(rng) < spec.pi ? 1 : 0;
    const double t = draw_time(rng, std::exp(log_mean_time(spec.scenario, spec.gamma, wi, a[i])));
    const double c = spec.censor_low + (spec.censor_high - spec.censor_low) * uniform01(rng);
    x[i] = std::min(t, c);
    event[i] = t <= c ? 1 : 0;
  }
  return TrialDataset(std::move(w), std::move(a), std::move(x), std::move(event), spec.pi, {"W1", "W2", "W3"});
}

TrueValue true_value(const ScenarioSpec& spec, MeasureId measure, const OracleOptions& options) {
  spec.validate();
  if (measure != MeasureId::log_hr && measure != MeasureId::surv_diff && measure != MeasureId::rmst_diff) {
    throw Error("no true-value oracle for measure " + to_string(measure));
  }
  if (spec.gamma == 0.0) return {0.0, 0.0};

  std::optional<std::filesystem::path> file;
  if (options.cache_dir) {
    file = *options.cache_dir / cache_name(spec, measure, options);
    if (auto cached = read_cache(*file)) return *cached;
  }

  TrueValue v;
  if (measure == MeasureId::log_hr) {
    ScenarioSpec big = spec;
    big.n = options.cox_sample_size;
    v.value = cox_unadjusted(generate_trial(big, options.seed)).log_hr();
  } else {
    v = arm_difference_truth(spec, measure, options);
  }
  if (file) write_cache(*file, v);
  return v;
}

}  // namespace augsurv
