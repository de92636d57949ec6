#pragma once

#include "augsurv/step_function.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace augsurv {

/// Risk-set summary at the distinct event times of a right-censored sample.
/// At a tied time, subjects censored there are still counted at risk
/// (events are processed before censorings).
struct EventTable {
  std::vector<double> times;         // distinct event times, increasing
  std::vector<std::size_t> at_risk;  // Y_k = #{X >= t_k}
  std::vector<std::size_t> events;   // d_k = #{X = t_k, Delta = 1}
  std::vector<double> sorted_times;  // all observed times, increasing
  std::vector<int> sorted_events;    // event indicators aligned with sorted_times

  static EventTable build(std::span<const double> times, std::span<const int> events);

  std::size_t sample_size() const noexcept { return sorted_times.size(); }
  /// #{X >= t}
  std::size_t count_at_risk(double t) const noexcept;
  /// #{X = t, Delta = 1}
  std::size_t count_events_at(double t) const noexcept;
  double last_time() const noexcept { return sorted_times.back(); }
};

StepFunction kaplan_meier(std::span<const double> times, std::span<const int> events);
StepFunction kaplan_meier(const EventTable& table);

StepFunction nelson_aalen(std::span<const double> times, std::span<const int> events);
StepFunction nelson_aalen(const EventTable& table);

/// Restricted mean: exact area under `surv` on [0, tau].
double rmst(const StepFunction& surv, double tau);

}  // namespace augsurv
