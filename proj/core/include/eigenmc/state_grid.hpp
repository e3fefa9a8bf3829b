#pragma once

#include <stdexcept>

namespace eigenmc {

// Uniform discretization of a value range into indexed states.
//
// State i represents the value lower_value + i * increment. Values map to
// the nearest state, ties rounding toward the lower index, and anything
// outside the covered range clamps to the boundary states.
class StateGrid {
 public:
  StateGrid(double lower_value, double increment, int n_states);

  // Nearest-state index of `value`, clamped to [0, n_states-1].
  // Throws std::domain_error for non-finite input (corrupt simulation state).
  int value_to_index(double value) const;

  // Representative value of state `index`. Throws std::out_of_range.
  double index_to_value(int index) const;

  int size() const noexcept { return n_states_; }
  double lower_value() const noexcept { return lower_value_; }
  double increment() const noexcept { return increment_; }
  double upper_value() const noexcept {
    return lower_value_ + increment_ * (n_states_ - 1);
  }

  bool operator==(const StateGrid&) const = default;

 private:
  double lower_value_;
  double increment_;
  int n_states_;
};

}  // namespace eigenmc
