#include "eigenmc/state_grid.hpp"

#include <cmath>
#include <string>

namespace eigenmc {

StateGrid::StateGrid(double lower_value, double increment, int n_states)
    : lower_value_(lower_value), increment_(increment), n_states_(n_states) {
  if (!std::isfinite(lower_value)) {
    throw std::invalid_argument("StateGrid: lower_value must be finite");
  }
  if (!(increment > 0.0) || !std::isfinite(increment)) {
    throw std::invalid_argument("StateGrid: increment must be positive");
  }
  if (n_states < 2) {
    throw std::invalid_argument("StateGrid: n_states must be at least 2");
  }
}

int StateGrid::value_to_index(double value) const {
  if (!std::isfinite(value)) {
    throw std::domain_error("StateGrid: non-finite value (corrupt simulation state): " +
                            std::to_string(value));
  }
  // Nearest index with ties toward the lower one: ceil(x - 1/2).
  const double x = (value - lower_value_) / increment_;
  const double r = std::ceil(x - 0.5);
  if (r <= 0.0) return 0;
  if (r >= static_cast<double>(n_states_ - 1)) return n_states_ - 1;
  return static_cast<int>(r);
}

double StateGrid::index_to_value(int index) const {
  if (index < 0 || index >= n_states_) {
    throw std::out_of_range("StateGrid: index " + std::to_string(index) +
                            " outside [0, " + std::to_string(n_states_ - 1) + "]");
  }
  return lower_value_ + increment_ * index;
}

}  // namespace eigenmc
