#include "qrnn/data.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "qrnn/log.hpp"
#include "qrnn/mapping.hpp"
#include "qrnn/random.hpp"

namespace qrnn {

namespace {

std::chrono::year_month_day to_ymd(const Date& d) {
  return std::chrono::year_month_day{std::chrono::year{d.year}, std::chrono::month{d.month},
                                     std::chrono::day{d.day}};
}

Date from_ymd(const std::chrono::year_month_day& ymd) {
  return Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
              static_cast<unsigned>(ymd.day())};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

std::string where(std::string_view source, std::size_t row) {
  return std::string(source) + ": row " + std::to_string(row) + ": ";
}

double log_ratio(double num, double den, std::size_t row, const char* what) {
  if (!(num > 0.0) || !(den > 0.0)) {
    throw DataError("row " + std::to_string(row) + ": non-positive price in log of " + what);
  }
  return std::log(num / den);
}

double return_of(double close, double prev, std::size_t row, const char* what) {
  if (!(prev > 0.0)) throw DataError("row " + std::to_string(row) + ": non-positive previous " + what);
  return close / prev - 1.0;
}

}  // namespace

Date Date::parse(std::string_view iso) {
  iso = trim(iso);
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' || !parse_number(iso.substr(0, 4), y) ||
      !parse_number(iso.substr(5, 2), m) || !parse_number(iso.substr(8, 2), d)) {
    throw DataError("invalid ISO date '" + std::string(iso) + "'");
  }
  const Date date{y, m, d};
  if (!to_ymd(date).ok()) throw DataError("invalid calendar date '" + std::string(iso) + "'");
  return date;
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

Date Date::plus_days(int days) const {
  return from_ymd(std::chrono::year_month_day{std::chrono::sys_days{to_ymd(*this)} + std::chrono::days{days}});
}

std::string_view to_string(FeatureSpec spec) { return spec == FeatureSpec::Yahoo3 ? "yahoo3" : "oxford7"; }

FeatureSpec parse_feature_spec(std::string_view name) {
  if (name == "yahoo3") return FeatureSpec::Yahoo3;
  if (name == "oxford7") return FeatureSpec::Oxford7;
  throw std::invalid_argument("unknown feature spec '" + std::string(name) + "'");
}

std::vector<std::string> required_extra_columns(FeatureSpec spec) {
  if (spec == FeatureSpec::Yahoo3) return {};
  return {"rv_median", "open_close", "dia_close", "dia_rv_median", "ndx_close", "ndx_rv_median"};
}

std::vector<std::string> feature_names(FeatureSpec spec) {
  if (spec == FeatureSpec::Yahoo3) return {"return", "log_high", "log_low"};
  return {"return", "rv_median", "open_close", "dia_return", "dia_rv_median", "ndx_return", "ndx_rv_median"};
}

void validate_record(const OhlcRecord& r, std::size_t row) {
  const std::string at = "row " + std::to_string(row) + ": ";
  if (!(r.low > 0.0)) throw DataError(at + "low must be positive");
  if (!(r.high >= std::max(r.open, r.close))) throw DataError(at + "high below open or close");
  if (!(std::min(r.open, r.close) >= r.low)) throw DataError(at + "low above open or close");
}

std::vector<OhlcRecord> parse_csv(std::string_view text, FeatureSpec spec, std::string_view source) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t nl = text.find('\n', start);
      const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      lines.push_back(line);
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw DataError(std::string(source) + ": empty file");

  const auto header = split_fields(lines[first]);
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError(std::string(source) + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_date = column("date");
  const std::size_t c_open = column("open");
  const std::size_t c_high = column("high");
  const std::size_t c_low = column("low");
  const std::size_t c_close = column("close");
  for (const auto& name : required_extra_columns(spec)) column(name);

  std::vector<OhlcRecord> records;
  for (std::size_t li = first + 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const std::size_t row = li + 1;  // 1-based file line
    const auto fields = split_fields(lines[li]);
    if (fields.size() != header.size()) {
      throw DataError(where(source, row) + "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    OhlcRecord rec;
    try {
      rec.date = Date::parse(fields[c_date]);
    } catch (const DataError& e) {
      throw DataError(where(source, row) + e.what());
    }
    auto number = [&](std::size_t c) {
      double v = 0.0;
      if (!parse_number(fields[c], v) || !std::isfinite(v)) {
        throw DataError(where(source, row) + "unparseable number '" + std::string(fields[c]) + "' in column '" +
                        std::string(header[c]) + "'");
      }
      return v;
    };
    rec.open = number(c_open);
    rec.high = number(c_high);
    rec.low = number(c_low);
    rec.close = number(c_close);
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == c_date || c == c_open || c == c_high || c == c_low || c == c_close) continue;
      rec.extra.emplace(std::string(header[c]), number(c));
    }
    try {
      validate_record(rec, row);
    } catch (const DataError& e) {
      throw DataError(std::string(source) + ": " + e.what());
    }
    records.push_back(std::move(rec));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const OhlcRecord& a, const OhlcRecord& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].date == records[i - 1].date) {
      throw DataError(std::string(source) + ": duplicate date " + records[i].date.iso());
    }
  }
  return records;
}

std::vector<OhlcRecord> load_csv(const std::filesystem::path& path, FeatureSpec spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), spec, path.string());
}

FeatureTable compute_features(const std::vector<OhlcRecord>& records, FeatureSpec spec) {
  if (records.size() < 2) throw std::invalid_argument("compute_features: need at least 2 records");
  FeatureTable table;
  table.names = feature_names(spec);
  const auto extras = required_extra_columns(spec);
  for (const auto& rec : records) {
    for (const auto& name : extras) {
      if (!rec.extra.contains(name)) {
        throw DataError("record " + rec.date.iso() + " lacks column '" + name + "'");
      }
    }
  }
  for (std::size_t t = 1; t < records.size(); ++t) {
    const auto& prev = records[t - 1];
    const auto& cur = records[t];
    FeatureRow row;
    row.push_back(return_of(cur.close, prev.close, t, "close"));
    if (spec == FeatureSpec::Yahoo3) {
      row.push_back(log_ratio(cur.high, prev.close, t, "high"));
      row.push_back(log_ratio(cur.low, prev.close, t, "low"));
    } else {
      row.push_back(cur.extra.at("rv_median"));
      row.push_back(cur.extra.at("open_close"));
      row.push_back(return_of(cur.extra.at("dia_close"), prev.extra.at("dia_close"), t, "dia_close"));
      row.push_back(cur.extra.at("dia_rv_median"));
      row.push_back(return_of(cur.extra.at("ndx_close"), prev.extra.at("ndx_close"), t, "ndx_close"));
      row.push_back(cur.extra.at("ndx_rv_median"));
    }
    table.dates.push_back(cur.date);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<SequenceSample> windowize(const FeatureMatrix& rows, std::size_t T, std::size_t target_index) {
  if (T == 0) throw std::invalid_argument("windowize: sequence length must be positive");
  if (rows.size() < T + 1) {
    throw std::invalid_argument("windowize: " + std::to_string(rows.size()) + " rows are too few for T = " +
                                std::to_string(T));
  }
  std::vector<SequenceSample> out;
  out.reserve(rows.size() - T);
  for (std::size_t m = 0; m + T < rows.size(); ++m) {
    SequenceSample s;
    s.inputs.assign(rows.begin() + static_cast<std::ptrdiff_t>(m), rows.begin() + static_cast<std::ptrdiff_t>(m + T));
    s.target = rows[m + T].at(target_index);
    s.first_row = m;
    s.target_row = m + T;
    out.push_back(std::move(s));
  }
  return out;
}

SplitResult split(std::vector<SequenceSample> samples, double test_ratio, std::size_t embargo) {
  if (!(test_ratio >= 0.0 && test_ratio < 1.0)) throw std::invalid_argument("split: test ratio must be in [0, 1)");
  const std::size_t m = samples.size();
  const auto n_train = std::min(m, static_cast<std::size_t>(std::ceil((1.0 - test_ratio) * static_cast<double>(m) - 1e-9)));
  SplitResult out;
  out.train.assign(std::make_move_iterator(samples.begin()),
                   std::make_move_iterator(samples.begin() + static_cast<std::ptrdiff_t>(n_train)));
  const std::size_t test_start = std::min(m, n_train + embargo);
  out.test.assign(std::make_move_iterator(samples.begin() + static_cast<std::ptrdiff_t>(test_start)),
                  std::make_move_iterator(samples.end()));
  if (out.test.empty()) warn("split: test set is empty");
  return out;
}

PreparedDataset prepare_dataset(const FeatureTable& table, const DatasetOptions& options) {
  const std::size_t T = options.sequence_length;
  if (table.rows.empty() || options.target_index >= table.rows.front().size()) {
    throw std::invalid_argument("prepare_dataset: target index " + std::to_string(options.target_index) +
                                " out of range");
  }
  PreparedDataset out;
  out.samples = split(windowize(table.rows, T, options.target_index), options.test_ratio, options.embargo);
  if (out.samples.train.empty()) throw std::invalid_argument("prepare_dataset: empty training set");
  const std::size_t fit_rows = out.samples.train.size() + T;
  out.scaler = fit_scaler(table.rows, fit_rows);
  const FeatureMatrix scaled = apply_scaler(out.scaler, table.rows);
  out.amplitude = AmplitudeFeature::fit(scaled, options.amplitude_feature, fit_rows);
  FeatureMatrix encoded;
  encoded.reserve(scaled.size());
  for (const auto& row : scaled) encoded.push_back(out.amplitude.apply(row));
  out.n_features = encoded.front().size();
  out.target_scale = TargetScale{out.scaler.mins[options.target_index], out.scaler.maxs[options.target_index]};
  out.train_rows.assign(encoded.begin(), encoded.begin() + static_cast<std::ptrdiff_t>(fit_rows - 1));
  out.dates = table.dates;
  out.encoded_rows = encoded;
  for (auto* set : {&out.samples.train, &out.samples.test}) {
    for (auto& s : *set) {
      s.inputs.assign(encoded.begin() + static_cast<std::ptrdiff_t>(s.first_row),
                      encoded.begin() + static_cast<std::ptrdiff_t>(s.first_row + T));
      s.target_probability = target_probability(s.target, out.target_scale.min, out.target_scale.max);
    }
  }
  return out;
}

std::vector<OhlcRecord> synthetic(std::uint64_t seed, std::size_t n_days, const SyntheticOptions& o) {
  if (n_days < 2) throw std::invalid_argument("synthetic: need at least 2 days");
  if (o.volatility < 0.0 || o.garch_alpha < 0.0 || o.garch_beta < 0.0 || o.garch_alpha + o.garch_beta >= 1.0) {
    throw std::invalid_argument("synthetic: invalid volatility parameters");
  }
  Rng rng(derive_seed(seed, {0xDA7A}));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double long_run = o.volatility * o.volatility;
  const double omega = long_run * (1.0 - o.garch_alpha - o.garch_beta);
  double h = long_run;
  double shock = 0.0;
  double close = o.start_price;
  double dia = o.start_price * 0.9;
  double ndx = o.start_price * 1.6;
  std::vector<OhlcRecord> out;
  out.reserve(n_days);
  for (std::size_t t = 0; t < n_days; ++t) {
    const double z = normal(rng);
    const double z_dia = normal(rng);
    const double z_ndx = normal(rng);
    const double z_open = normal(rng);
    const double u_high = std::abs(normal(rng));
    const double u_low = std::abs(normal(rng));
    const double z_rv = normal(rng);
    if (t > 0) h = omega + o.garch_alpha * shock * shock + o.garch_beta * h;
    const double sigma = std::sqrt(h);
    shock = sigma * z;
    OhlcRecord rec;
    rec.date = o.start.plus_days(static_cast<int>(t));
    const double prev = close;
    rec.open = prev * std::exp(0.25 * sigma * z_open);
    close = prev * std::exp(o.drift + shock);
    rec.close = close;
    rec.high = std::max(rec.open, rec.close) * std::exp(0.5 * sigma * u_high);
    rec.low = std::min(rec.open, rec.close) * std::exp(-0.5 * sigma * u_low);
    dia *= std::exp(o.drift + sigma * (0.9 * z + 0.43588989435406733 * z_dia));
    ndx *= std::exp(o.drift + 1.2 * sigma * (0.85 * z + 0.52678268764263692 * z_ndx));
    const double rv = sigma * std::exp(0.2 * z_rv);
    rec.extra["rv_median"] = rv;
    rec.extra["open_close"] = rec.close / rec.open - 1.0;
    rec.extra["dia_close"] = dia;
    rec.extra["dia_rv_median"] = 0.9 * rv;
    rec.extra["ndx_close"] = ndx;
    rec.extra["ndx_rv_median"] = 1.2 * rv;
    out.push_back(std::move(rec));
  }
  return out;
}

FeatureTable synthetic_ar1(std::uint64_t seed, std::size_t n_rows, std::size_t n_features, double phi, double sigma) {
  if (n_rows == 0 || n_features == 0) throw std::invalid_argument("synthetic_ar1: empty shape");
  if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("synthetic_ar1: |phi| must be below 1");
  Rng rng(derive_seed(seed, {0xA71}));
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureTable table;
  for (std::size_t k = 0; k < n_features; ++k) table.names.push_back("x" + std::to_string(k));
  FeatureRow state(n_features, 0.0);
  const double stationary = sigma / std::sqrt(1.0 - phi * phi);
  for (auto& v : state) v = stationary * normal(rng);
  const Date start{2017, 1, 2};
  for (std::size_t t = 0; t < n_rows; ++t) {
    const double common = normal(rng);
    for (std::size_t k = 0; k < n_features; ++k) {
      state[k] = phi * state[k] + sigma * (0.6 * common + 0.8 * normal(rng));
    }
    table.rows.push_back(state);
    table.dates.push_back(start.plus_days(static_cast<int>(t)));
  }
  return table;
}

FeatureMatrix stack_lags(const FeatureMatrix& rows, std::size_t width) {
  if (rows.empty() || rows.front().empty() || width == 0) throw std::invalid_argument("stack_lags: empty input");
  const std::size_t per = rows.front().size();
  const std::size_t lags = (width + per - 1) / per;
  FeatureMatrix out;
  for (std::size_t t = lags - 1; t < rows.size(); ++t) {
    FeatureRow r;
    r.reserve(lags * per);
    for (std::size_t l = 0; l < lags; ++l) r.insert(r.end(), rows[t - l].begin(), rows[t - l].end());
    r.resize(width, 0.0);
    out.push_back(std::move(r));
  }
  return out;
}

std::string samples_to_jsonl(const std::vector<SequenceSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    nlohmann::json j{{"inputs", s.inputs},
                     {"target", s.target},
                     {"target_probability", s.target_probability},
                     {"first_row", s.first_row},
                     {"target_row", s.target_row}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string to_csv(const std::vector<OhlcRecord>& records) {
  std::ostringstream os;
  os.precision(17);
  os << "date,open,high,low,close";
  if (!records.empty()) {
    for (const auto& [name, _] : records.front().extra) os << ',' << name;
  }
  os << '\n';
  for (const auto& r : records) {
    os << r.date.iso() << ',' << r.open << ',' << r.high << ',' << r.low << ',' << r.close;
    for (const auto& [_, v] : r.extra) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace qrnn
