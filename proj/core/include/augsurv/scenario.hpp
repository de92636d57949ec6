#pragma once

#include "augsurv/dataset.hpp"
#include "augsurv/effect_measures.hpp"
#include "augsurv/random.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

namespace augsurv {

/// Data-generating mechanisms. A is linear in log E(T|W,A); B adds a W2*W3
/// interaction; C adds a quadratic in W1; D has both.
enum class Scenario { A, B, C, D };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& text);

struct ScenarioSpec {
  Scenario scenario = Scenario::A;
  double gamma = 0.5;
  double pi = 0.5;
  std::size_t n = 250;
  double tau = 2.0;
  double censor_low = 1.0;
  double censor_high = 4.0;

  void validate() const;
  std::string label() const;
};

inline constexpr int kScenarioCovariates = 3;
inline constexpr double kWeibullShape = 3.0;

/// E(T | W, A). `w` holds (W1, W2, W3).
double conditional_mean_time(Scenario scenario, double gamma, std::span<const double> w, int a);

/// One Weibull event time given (W, A), by inverse CDF from one uniform.
double sample_event_time(Rng& rng, Scenario scenario, double gamma, std::span<const double> w, int a);

/// W ~ N(0, I_3), A ~ Bernoulli(pi), T | W, A Weibull with shape 3 and
/// scale E(T|W,A) / Gamma(4/3), C ~ U(censor_low, censor_high).
TrialDataset generate_trial(const ScenarioSpec& spec, std::uint64_t seed);

struct TrueValue {
  double value = 0.0;
  double mc_se = 0.0;  // 0 for exact or single-fit values
};

struct OracleOptions {
  std::size_t cox_sample_size = 1'000'000;
  std::size_t draws_per_arm = 10'000'000;
  std::uint64_t seed = 20240917;
  std::optional<std::filesystem::path> cache_dir;
};

/// Population value of the measure. gamma == 0 gives exactly 0. The log-HR
/// is the Cox fit on one huge generated trial; survival and RMST
/// differences average uncensored draws of T in each arm.
TrueValue true_value(const ScenarioSpec& spec, MeasureId measure, const OracleOptions& options = {});

}  // namespace augsurv
