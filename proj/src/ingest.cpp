#include "emostock/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "emostock/csv.hpp"
#include "emostock/errors.hpp"

namespace emostock {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool valid_ticker(std::string_view t) {
  if (t.empty() || t.size() > 6) return false;
  return std::all_of(t.begin(), t.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || c == '.';
  });
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  std::int64_t v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string join_fields(const csv::Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += row[i];
  }
  return out;
}

int require_column(const csv::Table& t, const std::string& name) {
  int idx = t.column(name);
  if (idx < 0)
    throw data_error(ErrorCode::missing_column,
                     "required column '" + name + "' not found in header");
  return idx;
}

}  // namespace

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::bad_date: return "BadDate";
    case RejectReason::bad_ticker: return "BadTicker";
    case RejectReason::empty_text: return "EmptyText";
    case RejectReason::encoding: return "Encoding";
    case RejectReason::missing_field: return "MissingField";
  }
  return "Unknown";
}

TweetParseResult parse_tweets(std::string_view text, const TweetSchema& schema) {
  if (!csv::valid_utf8(text.substr(0, text.find('\n'))))
    throw data_error(ErrorCode::encoding, "tweet CSV header is not UTF-8");

  csv::Table table = csv::read_table(text);
  if (table.header.empty())
    throw data_error(ErrorCode::missing_column, "tweet CSV has no header row");

  int c_date = require_column(table, schema.date);
  int c_ticker = require_column(table, schema.ticker);
  int c_company = require_column(table, schema.company);
  int c_text = require_column(table, schema.text);
  std::size_t needed = static_cast<std::size_t>(
      std::max({c_date, c_ticker, c_company, c_text}) + 1);

  TweetParseResult result;
  std::size_t row_number = 0;
  for (auto& row : table.rows) {
    ++row_number;
    auto reject = [&](RejectReason why) {
      result.rejects.push_back({row_number, why, join_fields(row)});
    };
    if (row.size() < needed) {
      reject(RejectReason::missing_field);
      continue;
    }
    const std::string& date_s = row[static_cast<std::size_t>(c_date)];
    const std::string& ticker = row[static_cast<std::size_t>(c_ticker)];
    const std::string& company = row[static_cast<std::size_t>(c_company)];
    const std::string& body = row[static_cast<std::size_t>(c_text)];

    if (!csv::valid_utf8(body) || !csv::valid_utf8(company)) {
      reject(RejectReason::encoding);
      continue;
    }
    auto date = Date::parse(trim(date_s));
    if (!date) {
      reject(RejectReason::bad_date);
      continue;
    }
    if (!valid_ticker(trim(ticker))) {
      reject(RejectReason::bad_ticker);
      continue;
    }
    std::string_view trimmed = trim(body);
    if (trimmed.empty()) {
      reject(RejectReason::empty_text);
      continue;
    }
    result.tweets.push_back(Tweet{*date, std::string(trim(ticker)),
                                  std::string(trim(company)), body});
  }
  return result;
}

TweetParseResult parse_tweets(std::istream& source, const TweetSchema& schema) {
  std::ostringstream buf;
  buf << source.rdbuf();
  return parse_tweets(std::string_view(buf.view()), schema);
}

std::vector<DailyPrice> parse_prices(std::string_view text) {
  csv::Table table = csv::read_table(text);
  if (table.header.empty())
    throw data_error(ErrorCode::missing_column, "price CSV has no header row");

  int c_date = require_column(table, "Date");
  int c_open = require_column(table, "Open");
  int c_high = require_column(table, "High");
  int c_low = require_column(table, "Low");
  int c_close = require_column(table, "Close");  // Adj Close ignored if present
  int c_volume = require_column(table, "Volume");

  std::vector<DailyPrice> prices;
  std::size_t row_number = 0;
  for (auto& row : table.rows) {
    ++row_number;
    auto bad = [&](const std::string& what) {
      return data_error(ErrorCode::bad_row,
                        "price row " + std::to_string(row_number) + ": " + what);
    };
    std::size_t needed = static_cast<std::size_t>(
        std::max({c_date, c_open, c_high, c_low, c_close, c_volume}) + 1);
    if (row.size() < needed) throw bad("too few fields");

    auto date = Date::parse(trim(row[static_cast<std::size_t>(c_date)]));
    if (!date) throw bad("unparseable date");
    auto open = parse_double(row[static_cast<std::size_t>(c_open)]);
    auto high = parse_double(row[static_cast<std::size_t>(c_high)]);
    auto low = parse_double(row[static_cast<std::size_t>(c_low)]);
    auto close = parse_double(row[static_cast<std::size_t>(c_close)]);
    auto volume = parse_int(row[static_cast<std::size_t>(c_volume)]);
    if (!open || !high || !low || !close || !volume)
      throw bad("unparseable numeric field");
    if (*open <= 0 || *high <= 0 || *low <= 0 || *close <= 0)
      throw data_error(ErrorCode::negative_price,
                       "non-positive price in row " + std::to_string(row_number));
    if (*volume < 0)
      throw data_error(ErrorCode::negative_price,
                       "negative volume in row " + std::to_string(row_number));
    if (*low > std::min(*open, *close) || *high < std::max(*open, *close))
      throw bad("OHLC range violation");
    if (!prices.empty() && !(prices.back().date < *date))
      throw data_error(ErrorCode::non_monotonic_dates,
                       "dates not strictly increasing at row " +
                           std::to_string(row_number));
    prices.push_back(DailyPrice{*date, *open, *high, *low, *close, *volume});
  }
  return prices;
}

std::vector<DailyPrice> parse_prices(std::istream& source) {
  std::ostringstream buf;
  buf << source.rdbuf();
  return parse_prices(std::string_view(buf.view()));
}

AlignmentReport align(std::span<const Tweet> tweets,
                      std::span<const DailyPrice> prices) {
  if (tweets.empty() || prices.empty())
    throw data_error(ErrorCode::empty_input,
                     "align requires non-empty tweets and prices");

  AlignmentReport report;
  report.period_start = prices.front().date;
  report.period_end = prices.back().date;
  report.trading_day_count = static_cast<int>(prices.size());

  std::set<std::int64_t> trading_days;
  for (const auto& p : prices) trading_days.insert(p.date.serial());

  std::set<std::int64_t> outside, non_trading;
  for (const auto& t : tweets) {
    std::int64_t s = t.date.serial();
    if (t.date < report.period_start || report.period_end < t.date)
      outside.insert(s);
    else if (!trading_days.contains(s))
      non_trading.insert(s);
  }
  report.tweet_days_outside_period = static_cast<int>(outside.size());
  report.non_trading_tweet_days = static_cast<int>(non_trading.size());
  return report;
}

std::string to_csv(std::span<const DailyPrice> prices) {
  std::string out = "Date,Open,High,Low,Close,Volume\n";
  char buf[64];
  for (const auto& p : prices) {
    out += p.date.iso();
    for (double v : {p.open, p.high, p.low, p.close}) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%lld\n",
                  static_cast<long long>(p.volume));
    out += buf;
  }
  return out;
}

std::string to_csv(std::span<const Tweet> tweets) {
  std::string out = "date,ticker,company,text\n";
  for (const auto& t : tweets)
    out += csv::format_row(std::vector<std::string>{
        t.date.iso(), t.ticker, t.company, t.text});
  return out;
}

std::string rejects_to_csv(std::span<const RejectedRow> rejects) {
  std::string out = "row,reason,raw\n";
  for (const auto& r : rejects)
    out += csv::format_row(std::vector<std::string>{
        std::to_string(r.row_number), to_string(r.reason), r.raw});
  return out;
}

}  // namespace emostock
