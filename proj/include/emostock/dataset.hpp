#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emostock/date.hpp"
#include "emostock/emotion.hpp"
#include "emostock/ingest.hpp"

namespace emostock {

enum class MovementLabel { stable = 0, significant_increase = 1, significant_decrease = 2 };

std::string label_name(MovementLabel label);
MovementLabel label_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Daily aggregation

struct ScoredTweet {
  Date date;
  EmotionVector emotion;
};

struct DailyEmotion {
  Date date;
  Eigen::VectorXd mean;              // zero vector on days without tweets
  std::size_t raw_tweet_count = 0;   // before any annotation filtering
  std::size_t contributing_count = 0;
};

enum class NonTradingPolicy { roll_forward, drop };

// One entry per trading day, in order. Weekend/holiday dates either roll
// forward to the next trading day or are dropped; dates after the last
// trading day are always dropped. raw_counts holds per-day tweet totals
// before filtering (the volume feature); the mean uses only `scored`, which
// must all carry `method` vectors.
std::vector<DailyEmotion> aggregate_daily(const std::vector<ScoredTweet>& scored,
                                          const std::map<Date, std::size_t>& raw_counts,
                                          const std::vector<Date>& trading_days,
                                          NonTradingPolicy policy,
                                          EmotionMethod method);

// ---------------------------------------------------------------------------
// Movement labels

// changes[i] = (close[i+1] - close[i]) / close[i] * 100
std::vector<double> percent_change(const std::vector<DailyPrice>& prices);

struct SigmaResult {
  double value = 0.0;
  bool degenerate = false;  // zero spread: every change labels as stable
};

SigmaResult sigma(const std::vector<double>& changes);

// Inclusive stable band: |change| <= sigma.
std::vector<MovementLabel> label_movements(const std::vector<double>& changes,
                                           double sigma_value);

// ---------------------------------------------------------------------------
// Feature rows

struct FeatureRow {
  Date date;
  Eigen::VectorXd features;
  MovementLabel label = MovementLabel::stable;
};

struct FeatureTable {
  std::vector<std::string> feature_names;
  std::vector<FeatureRow> rows;

  Eigen::Index feature_count() const {
    return static_cast<Eigen::Index>(feature_names.size());
  }
};

// Row i holds day i's features and the label of day i+1's movement; pass
// nullptr emotions for price-only rows (method is then ignored). labels[i]
// must correspond to the change from day i to day i+1 (percent_change order).
FeatureTable build_rows(const std::vector<DailyPrice>& prices,
                        const std::vector<DailyEmotion>* emotions,
                        EmotionMethod method,
                        const std::vector<MovementLabel>& labels);

// ---------------------------------------------------------------------------
// Scaling and chronological split

class MinMaxScaler {
 public:
  void fit(const FeatureTable& table);
  Eigen::VectorXd transform(const Eigen::VectorXd& features) const;

  const Eigen::VectorXd& minimum() const { return min_; }
  const Eigen::VectorXd& maximum() const { return max_; }

 private:
  Eigen::VectorXd min_, max_;
};

struct SplitDataset {
  FeatureTable train;  // features already scaled
  FeatureTable test;
  MinMaxScaler scaler;
};

// First floor(train_fraction * n) rows train, remainder test; the scaler is
// fit on the training rows only.
SplitDataset split_and_scale(const FeatureTable& table, double train_fraction = 0.7);

// ---------------------------------------------------------------------------
// Serialization

std::string to_csv(const FeatureTable& table);
FeatureTable feature_table_from_csv(std::string_view text);

struct ClassDistribution {
  std::size_t stable = 0;
  std::size_t increase = 0;
  std::size_t decrease = 0;
};

ClassDistribution count_labels(const std::vector<MovementLabel>& labels);
std::string distribution_csv(const std::vector<std::pair<std::string, ClassDistribution>>& rows);

}  // namespace emostock
