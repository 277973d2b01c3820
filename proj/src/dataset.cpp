#include "emostock/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "emostock/csv.hpp"
#include "emostock/errors.hpp"
#include "emostock/linalg.hpp"
#include "emostock/stats.hpp"

namespace emostock {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view field, std::size_t row) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value))
    throw data_error(ErrorCode::bad_row, "row " + std::to_string(row) +
                                             ": unreadable number '" + std::string(field) + "'");
  return value;
}

}  // namespace

std::string label_name(MovementLabel label) {
  switch (label) {
    case MovementLabel::stable: return "stable";
    case MovementLabel::significant_increase: return "significant_increase";
    case MovementLabel::significant_decrease: return "significant_decrease";
  }
  return "?";
}

MovementLabel label_from_name(const std::string& name) {
  if (name == "stable") return MovementLabel::stable;
  if (name == "significant_increase") return MovementLabel::significant_increase;
  if (name == "significant_decrease") return MovementLabel::significant_decrease;
  throw data_error(ErrorCode::bad_row, "unknown change level '" + name + "'");
}

// ---------------------------------------------------------------------------
// aggregate_daily

std::vector<DailyEmotion> aggregate_daily(const std::vector<ScoredTweet>& scored,
                                          const std::map<Date, std::size_t>& raw_counts,
                                          const std::vector<Date>& trading_days,
                                          NonTradingPolicy policy, EmotionMethod method) {
  if (trading_days.empty())
    throw data_error(ErrorCode::empty_input, "no trading days to aggregate onto");
  for (std::size_t i = 1; i < trading_days.size(); ++i)
    if (!(trading_days[i - 1] < trading_days[i]))
      throw data_error(ErrorCode::non_monotonic_dates, "trading days must be strictly increasing");

  const auto dims = static_cast<Eigen::Index>(emotion_dimensions(method).size());
  std::vector<DailyEmotion> out(trading_days.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].date = trading_days[i];
    out[i].mean = Eigen::VectorXd::Zero(dims);
  }

  // nullopt: the date maps onto no trading day under the policy
  auto day_for = [&](const Date& date) -> std::optional<std::size_t> {
    auto it = std::lower_bound(trading_days.begin(), trading_days.end(), date);
    if (it == trading_days.end()) return std::nullopt;  // after the final trading day
    if (policy == NonTradingPolicy::drop && *it != date) return std::nullopt;
    return static_cast<std::size_t>(it - trading_days.begin());
  };

  for (const auto& tweet : scored) {
    if (tweet.emotion.method != method || tweet.emotion.values.size() != dims)
      throw data_error(ErrorCode::mixed_methods,
                       "scored tweets mix emotion methods or dimension counts");
    if (!all_finite(tweet.emotion.values))
      throw data_error(ErrorCode::non_finite_input, "emotion vector has a non-finite entry");
    auto day = day_for(tweet.date);
    if (!day) continue;
    out[*day].mean += tweet.emotion.values;  // running sum until the final pass
    ++out[*day].contributing_count;
  }
  for (const auto& [date, count] : raw_counts) {
    auto day = day_for(date);
    if (day) out[*day].raw_tweet_count += count;
  }
  for (auto& day : out) {
    if (day.contributing_count > 0) day.mean /= static_cast<double>(day.contributing_count);
    if (day.raw_tweet_count < day.contributing_count)
      throw data_error(ErrorCode::bad_row,
                       day.date.iso() + ": raw tweet count below the contributing count");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Labels

std::vector<double> percent_change(const std::vector<DailyPrice>& prices) {
  if (prices.size() < 2)
    throw data_error(ErrorCode::too_short, "need at least two trading days for changes");
  std::vector<double> changes(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i)
    changes[i - 1] = (prices[i].close - prices[i - 1].close) / prices[i - 1].close * 100.0;
  return changes;
}

SigmaResult sigma(const std::vector<double>& changes) {
  SigmaResult result;
  result.value = stats::population_stddev(changes);
  result.degenerate = !(result.value > 0.0);
  return result;
}

std::vector<MovementLabel> label_movements(const std::vector<double>& changes,
                                           double sigma_value) {
  if (!std::isfinite(sigma_value) || sigma_value < 0.0)
    throw data_error(ErrorCode::non_finite_input, "threshold must be finite and non-negative");
  std::vector<MovementLabel> labels(changes.size());
  for (std::size_t i = 0; i < changes.size(); ++i) {
    if (changes[i] > sigma_value)
      labels[i] = MovementLabel::significant_increase;
    else if (changes[i] < -sigma_value)
      labels[i] = MovementLabel::significant_decrease;
    else
      labels[i] = MovementLabel::stable;
  }
  return labels;
}

// ---------------------------------------------------------------------------
// build_rows

FeatureTable build_rows(const std::vector<DailyPrice>& prices,
                        const std::vector<DailyEmotion>* emotions, EmotionMethod method,
                        const std::vector<MovementLabel>& labels) {
  if (prices.size() < 2)
    throw data_error(ErrorCode::too_short, "need at least two trading days to build rows");
  if (labels.size() != prices.size() - 1)
    throw data_error(ErrorCode::length_mismatch,
                     "label count must be one less than the trading day count");
  if (emotions) {
    if (emotions->size() != prices.size())
      throw data_error(ErrorCode::calendar_mismatch,
                       "daily emotion count does not match trading day count");
    for (std::size_t i = 0; i < prices.size(); ++i)
      if ((*emotions)[i].date != prices[i].date)
        throw data_error(ErrorCode::calendar_mismatch,
                         "daily emotions are not aligned with trading days");
  }

  FeatureTable table;
  table.feature_names = {"open", "close", "high", "low", "volume"};
  if (emotions) {
    for (const auto& dim : emotion_dimensions(method)) table.feature_names.push_back(dim);
    table.feature_names.push_back("tweet_volume");
  }
  const auto width = static_cast<Eigen::Index>(table.feature_names.size());

  table.rows.reserve(prices.size() - 1);
  for (std::size_t i = 0; i + 1 < prices.size(); ++i) {
    FeatureRow row;
    row.date = prices[i].date;
    row.features = Eigen::VectorXd(width);
    row.features[0] = prices[i].open;
    row.features[1] = prices[i].close;
    row.features[2] = prices[i].high;
    row.features[3] = prices[i].low;
    row.features[4] = static_cast<double>(prices[i].volume);
    if (emotions) {
      const auto& day = (*emotions)[i];
      const auto dims = day.mean.size();
      if (5 + dims + 1 != width)
        throw data_error(ErrorCode::shape_mismatch, "daily emotion width is inconsistent");
      row.features.segment(5, dims) = day.mean;
      row.features[width - 1] = static_cast<double>(day.raw_tweet_count);
    }
    if (!all_finite(row.features))
      throw data_error(ErrorCode::non_finite_input, "feature row has a non-finite entry");
    row.label = labels[i];
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Scaling and split

void MinMaxScaler::fit(const FeatureTable& table) {
  if (table.rows.empty())
    throw data_error(ErrorCode::too_few_rows, "cannot fit a scaler on zero rows");
  const auto width = table.rows.front().features.size();
  min_ = table.rows.front().features;
  max_ = table.rows.front().features;
  for (const auto& row : table.rows) {
    if (row.features.size() != width)
      throw data_error(ErrorCode::shape_mismatch, "rows have inconsistent widths");
    min_ = min_.cwiseMin(row.features);
    max_ = max_.cwiseMax(row.features);
  }
}

Eigen::VectorXd MinMaxScaler::transform(const Eigen::VectorXd& features) const {
  if (features.size() != min_.size())
    throw data_error(ErrorCode::shape_mismatch, "feature width does not match the fitted scaler");
  Eigen::VectorXd out(features.size());
  for (Eigen::Index j = 0; j < features.size(); ++j) {
    const double span = max_[j] - min_[j];
    out[j] = span > 0.0 ? (features[j] - min_[j]) / span : 0.0;
  }
  return out;
}

SplitDataset split_and_scale(const FeatureTable& table, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw config_error(ErrorCode::bad_config, "train fraction must be inside (0, 1)");
  const std::size_t n = table.rows.size();
  if (n < 10)
    throw data_error(ErrorCode::too_few_rows,
                     "need at least 10 rows to split, got " + std::to_string(n));
  const auto train_n = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(n)));

  SplitDataset split;
  split.train.feature_names = table.feature_names;
  split.test.feature_names = table.feature_names;

  FeatureTable train_raw;
  train_raw.feature_names = table.feature_names;
  train_raw.rows.assign(table.rows.begin(), table.rows.begin() + static_cast<long>(train_n));
  split.scaler.fit(train_raw);

  for (std::size_t i = 0; i < n; ++i) {
    FeatureRow row = table.rows[i];
    row.features = split.scaler.transform(row.features);
    (i < train_n ? split.train : split.test).rows.push_back(std::move(row));
  }
  return split;
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_csv(const FeatureTable& table) {
  std::ostringstream out;
  std::vector<std::string> header = {"date", "change_level"};
  header.insert(header.end(), table.feature_names.begin(), table.feature_names.end());
  csv::write_row(out, header);
  for (const auto& row : table.rows) {
    std::vector<std::string> fields = {row.date.iso(), label_name(row.label)};
    for (Eigen::Index j = 0; j < row.features.size(); ++j)
      fields.push_back(format_double(row.features[j]));
    csv::write_row(out, fields);
  }
  return out.str();
}

FeatureTable feature_table_from_csv(std::string_view text) {
  csv::Table parsed = csv::read_table(text);
  int date_col = parsed.column("date");
  int label_col = parsed.column("change_level");
  if (date_col < 0 || label_col < 0)
    throw data_error(ErrorCode::missing_column, "dataset needs date and change_level columns");

  FeatureTable table;
  std::vector<int> feature_cols;
  for (int j = 0; j < static_cast<int>(parsed.header.size()); ++j) {
    if (j == date_col || j == label_col) continue;
    feature_cols.push_back(j);
    table.feature_names.push_back(parsed.header[static_cast<std::size_t>(j)]);
  }
  if (feature_cols.empty())
    throw data_error(ErrorCode::missing_column, "dataset has no feature columns");

  for (std::size_t r = 0; r < parsed.rows.size(); ++r) {
    const auto& fields = parsed.rows[r];
    if (fields.size() != parsed.header.size())
      throw data_error(ErrorCode::bad_row,
                       "row " + std::to_string(r + 2) + ": wrong field count");
    FeatureRow row;
    auto date = Date::parse(fields[static_cast<std::size_t>(date_col)]);
    if (!date)
      throw data_error(ErrorCode::bad_row, "row " + std::to_string(r + 2) + ": unreadable date");
    row.date = *date;
    row.label = label_from_name(fields[static_cast<std::size_t>(label_col)]);
    row.features = Eigen::VectorXd(static_cast<Eigen::Index>(feature_cols.size()));
    for (std::size_t k = 0; k < feature_cols.size(); ++k)
      row.features[static_cast<Eigen::Index>(k)] =
          parse_double(fields[static_cast<std::size_t>(feature_cols[k])], r + 2);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ClassDistribution count_labels(const std::vector<MovementLabel>& labels) {
  ClassDistribution d;
  for (auto label : labels) {
    switch (label) {
      case MovementLabel::stable: ++d.stable; break;
      case MovementLabel::significant_increase: ++d.increase; break;
      case MovementLabel::significant_decrease: ++d.decrease; break;
    }
  }
  return d;
}

std::string distribution_csv(
    const std::vector<std::pair<std::string, ClassDistribution>>& rows) {
  std::ostringstream out;
  out << "ticker,stable_count,increase_count,decrease_count\n";
  for (const auto& [ticker, d] : rows) {
    const std::string fields[] = {ticker, std::to_string(d.stable),
                                  std::to_string(d.increase), std::to_string(d.decrease)};
    csv::write_row(out, fields);
  }
  return out.str();
}

}  // namespace emostock
