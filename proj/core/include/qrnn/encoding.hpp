#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qrnn/circuit.hpp"

namespace qrnn {

using FeatureRow = std::vector<double>;
using FeatureMatrix = std::vector<FeatureRow>;

constexpr std::size_t kAllRows = std::numeric_limits<std::size_t>::max();

enum class ScaleMode { MinMax, MaxMin };
enum class AmplitudeScaling { None, MinMax, MaxMin };

/// Per-feature bounds of a min-max scaler. MaxMin is the reflection 1 - MinMax.
struct MinMaxScaler {
  std::vector<double> mins;
  std::vector<double> maxs;

  std::size_t size() const { return mins.size(); }
  double range(std::size_t i) const { return maxs[i] - mins[i]; }
  double scale(double value, std::size_t i, ScaleMode mode = ScaleMode::MinMax) const;
  double unscale(double scaled, std::size_t i, ScaleMode mode = ScaleMode::MinMax) const;
};

/// Fits bounds on the first `n_rows` rows. Throws std::invalid_argument naming
/// the feature index if a feature is constant over those rows.
MinMaxScaler fit_scaler(const FeatureMatrix& rows, std::size_t n_rows = kAllRows);

FeatureRow apply_scaler(const MinMaxScaler& scaler, std::span<const double> x,
                        ScaleMode mode = ScaleMode::MinMax);
FeatureMatrix apply_scaler(const MinMaxScaler& scaler, const FeatureMatrix& rows,
                           ScaleMode mode = ScaleMode::MinMax);
FeatureRow invert_scaler(const MinMaxScaler& scaler, std::span<const double> scaled,
                         ScaleMode mode = ScaleMode::MinMax);

double l2_norm(std::span<const double> x);

/// x / ||x||_2; throws std::invalid_argument on the all-zero vector.
FeatureRow normalize_l2(std::span<const double> x);

/// The appended pre-normalization magnitude feature, with its scaler bounds
/// fitted on training rows.
struct AmplitudeFeature {
  AmplitudeScaling mode = AmplitudeScaling::None;
  double min = 0.0;
  double max = 1.0;

  static AmplitudeFeature fit(const FeatureMatrix& scaled, AmplitudeScaling mode,
                              std::size_t train_rows = kAllRows);
  /// Appends the scaled l2 norm of `scaled_row`; identity when mode is None.
  FeatureRow apply(std::span<const double> scaled_row) const;
};

/// For every (already MinMax-scaled) row, appends its l2 norm as feature N+1
/// and scales that column with `mode`, fitting on the first `train_rows` rows.
FeatureMatrix augment_amplitude_feature(const FeatureMatrix& scaled, AmplitudeScaling mode,
                                        std::size_t train_rows = kAllRows);

/// One RY(x_i) on qubit i. Values outside [0, 1] are passed through with a warning.
Circuit angle_feature_map(std::span<const double> scaled);

/// Number of qubits needed to hold `n_features` amplitudes (at least 1).
int amplitude_qubits(std::size_t n_features);

/// Exact state preparation of a non-negative unit vector by a binary tree of
/// uniformly controlled RY rotations, each expanded on a Gray-code walk into
/// 2^k RY and 2^k CX gates (k = number of controls). Vectors shorter than a
/// power of two are zero-padded at the end.
Circuit amplitude_qsp(std::span<const double> amplitudes);

/// Appends a uniformly controlled RY on `target`: for control value j (bit b
/// of j is qubit controls[b]) the target is rotated by angles[j].
void append_multiplexed_ry(Circuit& circuit, std::span<const int> controls, int target,
                           std::span<const double> angles);

}  // namespace qrnn
