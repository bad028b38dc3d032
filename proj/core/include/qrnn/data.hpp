#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qrnn/encoding.hpp"
#include "qrnn/qrnn.hpp"

namespace qrnn {

/// Calendar day as an ISO string "YYYY-MM-DD"; ordering is lexicographic.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  static Date parse(std::string_view iso);
  std::string iso() const;
  Date plus_days(int days) const;
  auto operator<=>(const Date&) const = default;
};

struct OhlcRecord {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::map<std::string, double> extra;
};

enum class FeatureSpec { Yahoo3, Oxford7 };

std::string_view to_string(FeatureSpec spec);
FeatureSpec parse_feature_spec(std::string_view name);
/// Input columns beyond date/open/high/low/close that `spec` requires.
std::vector<std::string> required_extra_columns(FeatureSpec spec);
std::vector<std::string> feature_names(FeatureSpec spec);

/// Thrown for malformed data files; the message carries the path and row.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads `date,open,high,low,close[,extra...]`. Extra columns required by
/// `spec` must be present; other columns are kept in OhlcRecord::extra.
/// Rows are validated (high >= max(open, close) >= min(open, close) >= low > 0),
/// sorted by date, and duplicate dates are rejected.
std::vector<OhlcRecord> load_csv(const std::filesystem::path& path, FeatureSpec spec);
std::vector<OhlcRecord> parse_csv(std::string_view text, FeatureSpec spec,
                                  std::string_view source = "<memory>");
void validate_record(const OhlcRecord& record, std::size_t row);

struct FeatureTable {
  std::vector<Date> dates;
  FeatureMatrix rows;
  std::vector<std::string> names;
};

/// yahoo3: [close_t / close_{t-1} - 1, log(high_t / close_{t-1}), log(low_t / close_{t-1})].
/// oxford7: [spx return, rv_median, open_close, dia return, dia_rv_median,
/// ndx return, ndx_rv_median]. The first record only supplies previous closes.
FeatureTable compute_features(const std::vector<OhlcRecord>& records, FeatureSpec spec);

/// A length-T window of raw feature rows [first_row, first_row + T) and the
/// next-step value of the target feature.
struct SequenceSample {
  Sequence inputs;
  double target = 0.0;
  double target_probability = 0.0;
  std::size_t first_row = 0;
  std::size_t target_row = 0;
};

/// Stride-1 windows: rows.size() - T samples. Throws if rows.size() < T + 1.
std::vector<SequenceSample> windowize(const FeatureMatrix& rows, std::size_t T, std::size_t target_index);

struct SplitResult {
  std::vector<SequenceSample> train;
  std::vector<SequenceSample> test;
};

/// Chronological split: the first ceil((1 - test_ratio) M) samples train; the
/// next `embargo` samples are dropped; the rest test. Warns on an empty test set.
SplitResult split(std::vector<SequenceSample> samples, double test_ratio, std::size_t embargo = 0);

struct DatasetOptions {
  std::size_t sequence_length = 8;
  double test_ratio = 0.2;
  std::size_t target_index = 0;
  std::size_t embargo = 0;
  AmplitudeScaling amplitude_feature = AmplitudeScaling::None;
};

/// Windows, split, scalers and encoded-ready inputs of one dataset. Sample
/// inputs hold MinMax-scaled rows (plus the amplitude feature if enabled);
/// targets stay in raw units with probabilities from the target's bounds.
struct PreparedDataset {
  SplitResult samples;
  MinMaxScaler scaler;
  AmplitudeFeature amplitude;
  TargetScale target_scale;
  std::size_t n_features = 0;
  /// Every encoded row of the training windows, for fitting EnQode.
  FeatureMatrix train_rows;
  /// Every encoded row of the table.
  FeatureMatrix encoded_rows;
  std::vector<Date> dates;
};

/// Scalers are fitted on the rows covered by training windows and targets.
PreparedDataset prepare_dataset(const FeatureTable& table, const DatasetOptions& options);

struct SyntheticOptions {
  double start_price = 100.0;
  double drift = 2e-4;
  double volatility = 0.01;
  /// GARCH(1,1)-like variance recursion weights; volatility is the long-run level.
  double garch_alpha = 0.08;
  double garch_beta = 0.9;
  Date start{2017, 1, 2};
};

/// Geometric Brownian closes with a GARCH-like variance, intraday high/low
/// envelopes and all oxford7 extra columns. Deterministic per seed. With
/// volatility 0 every close-to-close return equals exp(drift) - 1.
std::vector<OhlcRecord> synthetic(std::uint64_t seed, std::size_t n_days, const SyntheticOptions& options = {});

/// Stationary AR(1) features x_t = phi x_{t-1} + sigma eps for `n_features`
/// coupled channels, returned as a feature table with consecutive dates.
FeatureTable synthetic_ar1(std::uint64_t seed, std::size_t n_rows, std::size_t n_features, double phi = 0.8,
                           double sigma = 0.1);

/// Row t of the result concatenates rows t, t-1, ... (newest first) until
/// `width` values are collected, zero-padding the tail. The first
/// ceil(width / row size) - 1 rows lack history and are skipped.
FeatureMatrix stack_lags(const FeatureMatrix& rows, std::size_t width);

/// One JSON object per line: {inputs, target, target_probability, first_row, target_row}.
std::string samples_to_jsonl(const std::vector<SequenceSample>& samples);

std::string to_csv(const std::vector<OhlcRecord>& records);

}  // namespace qrnn
