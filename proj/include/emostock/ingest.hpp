#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "emostock/date.hpp"

namespace emostock {

struct Tweet {
  Date date;
  std::string ticker;   // matches [A-Z.]{1,6}
  std::string company;
  std::string text;     // UTF-8, non-empty after trim
};

struct DailyPrice {
  Date date;
  double open = 0;
  double high = 0;
  double low = 0;
  double close = 0;
  std::int64_t volume = 0;
};

struct AlignmentReport {
  Date period_start;
  Date period_end;
  int trading_day_count = 0;
  int tweet_days_outside_period = 0;  // distinct tweet dates outside period
  int non_trading_tweet_days = 0;     // distinct in-period dates with no bar
};

// Logical-field -> column-name mapping for tweet CSVs.
struct TweetSchema {
  std::string date = "date";
  std::string ticker = "ticker";
  std::string company = "company";
  std::string text = "text";
};

enum class RejectReason {
  bad_date,
  bad_ticker,
  empty_text,
  encoding,
  missing_field,
};

const char* to_string(RejectReason r);

struct RejectedRow {
  std::size_t row_number = 0;  // 1-based data-row index
  RejectReason reason;
  std::string raw;
};

struct TweetParseResult {
  std::vector<Tweet> tweets;          // input order preserved
  std::vector<RejectedRow> rejects;   // tweets.size() + rejects.size() == data rows
};

// Rows that fail Tweet invariants land in `rejects`; structural problems
// (missing schema columns, non-UTF-8 header) throw.
TweetParseResult parse_tweets(std::istream& source,
                              const TweetSchema& schema = {});
TweetParseResult parse_tweets(std::string_view text,
                              const TweetSchema& schema = {});

// Yahoo Finance daily layout, 6 columns (Date,Open,High,Low,Close,Volume) or
// 7 with Adj Close. The unadjusted Close is used either way. Dates must be
// strictly increasing; invariant violations throw.
std::vector<DailyPrice> parse_prices(std::istream& source);
std::vector<DailyPrice> parse_prices(std::string_view text);

AlignmentReport align(std::span<const Tweet> tweets,
                      std::span<const DailyPrice> prices);

std::string to_csv(std::span<const DailyPrice> prices);
std::string to_csv(std::span<const Tweet> tweets);
std::string rejects_to_csv(std::span<const RejectedRow> rejects);

}  // namespace emostock
