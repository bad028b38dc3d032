#pragma once

#include <stdexcept>

namespace qrnn {

// Probability <-> value mapping of the forecast head. The two functions are
// exact inverses of each other for max > min.

/// y = min + p (max - min).
inline double predicted_value(double probability, double min, double max) {
  return min + probability * (max - min);
}

/// p = (x - min) / (max - min); throws std::invalid_argument unless max > min.
inline double target_probability(double value, double min, double max) {
  if (!(max > min)) throw std::invalid_argument("target_probability: degenerate bounds");
  return (value - min) / (max - min);
}

}  // namespace qrnn
