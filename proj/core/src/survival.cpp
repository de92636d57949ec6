#include "augsurv/survival.hpp"

#include "augsurv/error.hpp"

#include <algorithm>
#include <numeric>

namespace augsurv {

EventTable EventTable::build(std::span<const double> times, std::span<const int> events) {
  if (times.empty()) throw Error("empty sample");
  if (times.size() != events.size()) throw Error("times and events differ in length");
  for (double t : times) {
    if (!(t > 0.0)) throw Error("times must be positive");
  }

  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  EventTable table;
  table.sorted_times.reserve(times.size());
  table.sorted_events.reserve(times.size());
  for (std::size_t i : order) {
    table.sorted_times.push_back(times[i]);
    table.sorted_events.push_back(events[i]);
  }

  const std::size_t n = times.size();
  std::size_t pos = 0;
  while (pos < n) {
    const double t = table.sorted_times[pos];
    std::size_t end = pos;
    std::size_t deaths = 0;
    while (end < n && table.sorted_times[end] == t) {
      deaths += static_cast<std::size_t>(table.sorted_events[end] == 1);
      ++end;
    }
    if (deaths > 0) {
      table.times.push_back(t);
      table.at_risk.push_back(n - pos);
      table.events.push_back(deaths);
    }
    pos = end;
  }
  return table;
}

std::size_t EventTable::count_at_risk(double t) const noexcept {
  const auto it = std::lower_bound(sorted_times.begin(), sorted_times.end(), t);
  return static_cast<std::size_t>(sorted_times.end() - it);
}

std::size_t EventTable::count_events_at(double t) const noexcept {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end() || *it != t) return 0;
  return events[static_cast<std::size_t>(it - times.begin())];
}

StepFunction kaplan_meier(const EventTable& table) {
  std::vector<double> values;
  values.reserve(table.times.size());
  double surv = 1.0;
  for (std::size_t k = 0; k < table.times.size(); ++k) {
    surv *= 1.0 - static_cast<double>(table.events[k]) / static_cast<double>(table.at_risk[k]);
    values.push_back(surv);
  }
  return StepFunction(table.times, std::move(values), 1.0);
}

StepFunction kaplan_meier(std::span<const double> times, std::span<const int> events) {
  return kaplan_meier(EventTable::build(times, events));
}

StepFunction nelson_aalen(const EventTable& table) {
  std::vector<double> values;
  values.reserve(table.times.size());
  double cumhaz = 0.0;
  for (std::size_t k = 0; k < table.times.size(); ++k) {
    cumhaz += static_cast<double>(table.events[k]) / static_cast<double>(table.at_risk[k]);
    values.push_back(cumhaz);
  }
  return StepFunction(table.times, std::move(values), 0.0);
}

StepFunction nelson_aalen(std::span<const double> times, std::span<const int> events) {
  return nelson_aalen(EventTable::build(times, events));
}

double rmst(const StepFunction& surv, double tau) {
  if (!(tau > 0.0)) throw Error("tau must be positive");
  return surv.integrate(tau);
}

}  // namespace augsurv
