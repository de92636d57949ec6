#include "augsurv/step_function.hpp"

#include "augsurv/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace augsurv {

StepFunction::StepFunction(std::vector<double> jump_times, std::vector<double> values,
                           double initial_value)
    : jump_times_(std::move(jump_times)), values_(std::move(values)), initial_value_(initial_value) {
  if (jump_times_.size() != values_.size()) throw Error("step function: size mismatch");
  for (std::size_t k = 0; k < jump_times_.size(); ++k) {
    if (!(jump_times_[k] > 0.0) || !std::isfinite(jump_times_[k])) {
      throw Error("step function: jump times must be positive and finite");
    }
    if (k > 0 && !(jump_times_[k] > jump_times_[k - 1])) {
      throw Error("step function: jump times must be strictly increasing");
    }
  }
}

double StepFunction::operator()(double t) const noexcept {
  // Index of the last jump time <= t.
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
  if (it == jump_times_.begin()) return initial_value_;
  return values_[static_cast<std::size_t>(it - jump_times_.begin()) - 1];
}

double StepFunction::integrate(double upper) const noexcept {
  if (upper <= 0.0) return 0.0;
  double area = 0.0;
  double left = 0.0;
  double level = initial_value_;
  for (std::size_t k = 0; k < jump_times_.size() && jump_times_[k] < upper; ++k) {
    area += (jump_times_[k] - left) * level;
    left = jump_times_[k];
    level = values_[k];
  }
  return area + (upper - left) * level;
}

}  // namespace augsurv
