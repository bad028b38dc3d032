#include "qrnn/encoding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qrnn/log.hpp"

namespace qrnn {

double MinMaxScaler::scale(double value, std::size_t i, ScaleMode mode) const {
  const double s = (value - mins.at(i)) / (maxs.at(i) - mins.at(i));
  return mode == ScaleMode::MinMax ? s : 1.0 - s;
}

double MinMaxScaler::unscale(double scaled, std::size_t i, ScaleMode mode) const {
  const double s = mode == ScaleMode::MinMax ? scaled : 1.0 - scaled;
  return mins.at(i) + s * (maxs.at(i) - mins.at(i));
}

MinMaxScaler fit_scaler(const FeatureMatrix& rows, std::size_t n_rows) {
  n_rows = std::min(n_rows, rows.size());
  if (n_rows == 0) throw std::invalid_argument("fit_scaler: no rows to fit");
  const std::size_t width = rows.front().size();
  MinMaxScaler scaler{rows.front(), rows.front()};
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (rows[r].size() != width) throw std::invalid_argument("fit_scaler: ragged matrix");
    for (std::size_t i = 0; i < width; ++i) {
      scaler.mins[i] = std::min(scaler.mins[i], rows[r][i]);
      scaler.maxs[i] = std::max(scaler.maxs[i], rows[r][i]);
    }
  }
  for (std::size_t i = 0; i < width; ++i) {
    if (!(scaler.maxs[i] > scaler.mins[i])) {
      throw std::invalid_argument("fit_scaler: feature " + std::to_string(i) +
                                  " is constant over the fitted rows");
    }
  }
  return scaler;
}

FeatureRow apply_scaler(const MinMaxScaler& scaler, std::span<const double> x, ScaleMode mode) {
  if (x.size() != scaler.size()) throw std::invalid_argument("apply_scaler: width mismatch");
  FeatureRow out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scaler.scale(x[i], i, mode);
  return out;
}

FeatureMatrix apply_scaler(const MinMaxScaler& scaler, const FeatureMatrix& rows, ScaleMode mode) {
  FeatureMatrix out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(apply_scaler(scaler, row, mode));
  return out;
}

FeatureRow invert_scaler(const MinMaxScaler& scaler, std::span<const double> scaled, ScaleMode mode) {
  if (scaled.size() != scaler.size()) throw std::invalid_argument("invert_scaler: width mismatch");
  FeatureRow out(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) out[i] = scaler.unscale(scaled[i], i, mode);
  return out;
}

double l2_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

FeatureRow normalize_l2(std::span<const double> x) {
  const double norm = l2_norm(x);
  if (norm == 0.0) {
    throw std::invalid_argument("normalize_l2: all-zero vector cannot be amplitude encoded");
  }
  FeatureRow out(x.begin(), x.end());
  for (double& v : out) v /= norm;
  return out;
}

AmplitudeFeature AmplitudeFeature::fit(const FeatureMatrix& scaled, AmplitudeScaling mode,
                                       std::size_t train_rows) {
  if (scaled.empty()) throw std::invalid_argument("augment_amplitude_feature: empty matrix");
  AmplitudeFeature f;
  f.mode = mode;
  if (mode == AmplitudeScaling::None) return f;
  FeatureMatrix norms;
  norms.reserve(scaled.size());
  for (const auto& row : scaled) norms.push_back({l2_norm(row)});
  const MinMaxScaler s = fit_scaler(norms, train_rows);
  f.min = s.mins[0];
  f.max = s.maxs[0];
  return f;
}

FeatureRow AmplitudeFeature::apply(std::span<const double> scaled_row) const {
  FeatureRow out(scaled_row.begin(), scaled_row.end());
  if (mode == AmplitudeScaling::None) return out;
  const double s = (l2_norm(scaled_row) - min) / (max - min);
  out.push_back(mode == AmplitudeScaling::MinMax ? s : 1.0 - s);
  return out;
}

FeatureMatrix augment_amplitude_feature(const FeatureMatrix& scaled, AmplitudeScaling mode,
                                        std::size_t train_rows) {
  const AmplitudeFeature feature = AmplitudeFeature::fit(scaled, mode, train_rows);
  FeatureMatrix out;
  out.reserve(scaled.size());
  for (const auto& row : scaled) out.push_back(feature.apply(row));
  return out;
}

Circuit angle_feature_map(std::span<const double> scaled) {
  Circuit c(static_cast<int>(scaled.size()));
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    if (scaled[i] < 0.0 || scaled[i] > 1.0) {
      warn("angle_feature_map: scaled feature outside [0, 1] passed through unclipped");
    }
    c.ry(static_cast<int>(i), scaled[i]);
  }
  return c;
}

int amplitude_qubits(std::size_t n_features) {
  if (n_features == 0) throw std::invalid_argument("amplitude encoding needs at least one feature");
  return std::max(1, static_cast<int>(std::bit_width(n_features - 1)));
}

void append_multiplexed_ry(Circuit& circuit, std::span<const int> controls, int target,
                           std::span<const double> angles) {
  const std::size_t k = controls.size();
  const std::size_t m = std::size_t{1} << k;
  if (angles.size() != m) throw std::invalid_argument("multiplexed RY: need 2^k angles");
  if (k == 0) {
    circuit.ry(target, angles[0]);
    return;
  }
  // alpha_j = sum_i (-1)^{popcount(j & g_i)} theta_i with g_i the Gray code of
  // i; the sign matrix is orthogonal up to a factor m.
  std::vector<std::uint64_t> gray(m);
  for (std::size_t i = 0; i < m; ++i) gray[i] = i ^ (i >> 1);
  for (std::size_t i = 0; i < m; ++i) {
    double theta = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      theta += (std::popcount(j & gray[i]) % 2 == 0 ? 1.0 : -1.0) * angles[j];
    }
    circuit.ry(target, theta / static_cast<double>(m));
    const std::uint64_t flip = gray[i] ^ gray[(i + 1) % m];
    circuit.cx(controls[std::countr_zero(flip)], target);
  }
}

Circuit amplitude_qsp(std::span<const double> amplitudes) {
  const int n = amplitude_qubits(amplitudes.size());
  const std::size_t dim = std::size_t{1} << n;
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (amplitudes[i] < 0.0) {
      throw std::invalid_argument("amplitude_qsp: component " + std::to_string(i) + " is negative");
    }
    norm_sq += amplitudes[i] * amplitudes[i];
  }
  if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-9) {
    throw std::invalid_argument("amplitude_qsp: input is not unit norm");
  }
  std::vector<double> mass(dim, 0.0);
  for (std::size_t i = 0; i < amplitudes.size(); ++i) mass[i] = amplitudes[i] * amplitudes[i];

  Circuit c(n);
  std::vector<int> controls;
  for (int level = 0; level < n; ++level) {
    const int target = n - 1 - level;
    const std::size_t block = std::size_t{1} << (n - level);
    const std::size_t half = block / 2;
    std::vector<double> angles(std::size_t{1} << level);
    for (std::size_t j = 0; j < angles.size(); ++j) {
      double left = 0.0, right = 0.0;
      for (std::size_t i = 0; i < half; ++i) {
        left += mass[j * block + i];
        right += mass[j * block + half + i];
      }
      angles[j] = 2.0 * std::atan2(std::sqrt(right), std::sqrt(left));
    }
    // Bit b of the node index j is qubit n - level + b.
    append_multiplexed_ry(c, controls, target, angles);
    controls.insert(controls.begin(), target);
  }
  return c;
}

}  // namespace qrnn
