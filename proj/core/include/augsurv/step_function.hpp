#pragma once

#include <span>
#include <vector>

namespace augsurv {

/// Right-continuous piecewise-constant function on [0, inf).
/// Takes `initial_value` on [0, t_1) and `values[k]` on [t_k, t_{k+1}).
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> jump_times, std::vector<double> values, double initial_value);

  double operator()(double t) const noexcept;

  /// Exact integral over [0, upper].
  double integrate(double upper) const noexcept;

  std::span<const double> jump_times() const noexcept { return jump_times_; }
  std::span<const double> values() const noexcept { return values_; }
  double initial_value() const noexcept { return initial_value_; }
  std::size_t size() const noexcept { return jump_times_.size(); }

 private:
  std::vector<double> jump_times_;
  std::vector<double> values_;
  double initial_value_ = 0.0;
};

}  // namespace augsurv
