#include <doctest.h>

#include <functional>
#include <string>

#include "emostock/errors.hpp"
#include "emostock/ingest.hpp"

using namespace emostock;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an emostock::Error");
  return ErrorCode::bad_config;
}

}  // namespace

TEST_CASE("parse_tweets keeps valid rows in order") {
  const std::string text =
      "date,ticker,company,text\n"
      "2021-01-04,TSLA,Tesla,\"Loving the new model, buying more\"\n"
      "2021-01-05,AAPL,Apple,Solid earnings ahead\n";
  auto result = parse_tweets(std::string_view(text));
  REQUIRE(result.tweets.size() == 2);
  CHECK(result.rejects.empty());
  CHECK(result.tweets[0].ticker == "TSLA");
  CHECK(result.tweets[0].date.iso() == "2021-01-04");
  CHECK(result.tweets[0].text == "Loving the new model, buying more");
  CHECK(result.tweets[1].ticker == "AAPL");
}

TEST_CASE("parse_tweets honors a custom schema") {
  const std::string text =
      "Tweet Date,Symbol,Name,Body\n"
      "2021-01-04,TSLA,Tesla,hello\n";
  TweetSchema schema;
  schema.date = "Tweet Date";
  schema.ticker = "Symbol";
  schema.company = "Name";
  schema.text = "Body";
  auto result = parse_tweets(std::string_view(text), schema);
  REQUIRE(result.tweets.size() == 1);
  CHECK(result.tweets[0].company == "Tesla");
}

TEST_CASE("parse_tweets rejects bad rows without aborting") {
  const std::string text =
      "date,ticker,company,text\n"
      "not-a-date,TSLA,Tesla,hello\n"
      "2021-01-04,toolong7,Tesla,hello\n"
      "2021-01-04,TSLA,Tesla,   \n"
      "2021-01-04,TSLA,Tesla,ok tweet\n"
      "2021-01-04,TSLA\n";
  auto result = parse_tweets(std::string_view(text));
  REQUIRE(result.tweets.size() == 1);
  CHECK(result.tweets[0].text == "ok tweet");
  REQUIRE(result.rejects.size() == 4);
  CHECK(result.rejects[0].reason == RejectReason::bad_date);
  CHECK(result.rejects[1].reason == RejectReason::bad_ticker);
  CHECK(result.rejects[2].reason == RejectReason::empty_text);
  CHECK(result.rejects[3].reason == RejectReason::missing_field);
  CHECK(result.rejects[0].row_number == 1);
  CHECK(result.rejects[3].row_number == 5);
}

TEST_CASE("parse_tweets rejects non-UTF-8 bodies") {
  std::string text = "date,ticker,company,text\n2021-01-04,TSLA,Tesla,bad\xFF\xFE\n";
  auto result = parse_tweets(std::string_view(text));
  CHECK(result.tweets.empty());
  REQUIRE(result.rejects.size() == 1);
  CHECK(result.rejects[0].reason == RejectReason::encoding);
}

TEST_CASE("parse_tweets requires the schema columns") {
  CHECK(code_of([] {
          parse_tweets(std::string_view("date,ticker,text\nx,y,z\n"));
        }) == ErrorCode::missing_column);
}

TEST_CASE("parse_prices reads both Yahoo layouts") {
  const std::string six =
      "Date,Open,High,Low,Close,Volume\n"
      "2021-01-04,100,102,99,101,5000\n";
  auto p6 = parse_prices(std::string_view(six));
  REQUIRE(p6.size() == 1);
  CHECK(p6[0].close == 101.0);
  CHECK(p6[0].volume == 5000);

  const std::string seven =
      "Date,Open,High,Low,Close,Adj Close,Volume\n"
      "2021-01-04,100,102,99,101,42.0,5000\n";  // Adj Close must be ignored
  auto p7 = parse_prices(std::string_view(seven));
  REQUIRE(p7.size() == 1);
  CHECK(p7[0].close == 101.0);
}

TEST_CASE("parse_prices enforces invariants") {
  CHECK(code_of([] {
          parse_prices(std::string_view("Date,Open,High,Low,Close,Volume\n"
                                        "2021-01-05,100,102,99,101,5000\n"
                                        "2021-01-04,100,102,99,101,5000\n"));
        }) == ErrorCode::non_monotonic_dates);
  CHECK(code_of([] {
          parse_prices(std::string_view("Date,Open,High,Low,Close,Volume\n"
                                        "2021-01-04,100,102,99,101,5000\n"
                                        "2021-01-04,100,102,99,101,5000\n"));
        }) == ErrorCode::non_monotonic_dates);
  CHECK(code_of([] {
          parse_prices(std::string_view("Date,Open,High,Low,Close,Volume\n"
                                        "2021-01-04,-1,102,99,101,5000\n"));
        }) == ErrorCode::negative_price);
  CHECK(code_of([] {
          parse_prices(std::string_view("Date,Open,High,Low,Close,Volume\n"
                                        "2021-01-04,100,100.5,99,101,5000\n"));
        }) == ErrorCode::bad_row);  // high below close
  CHECK(code_of([] {
          parse_prices(std::string_view("Date,Open,High,Low,Close,Volume\n"
                                        "2021-01-04,100,102,99,oops,5000\n"));
        }) == ErrorCode::bad_row);
  CHECK(code_of([] {
          parse_prices(std::string_view("Date,Open,High,Low,Volume\nx\n"));
        }) == ErrorCode::missing_column);
}

TEST_CASE("price CSV round-trips exactly") {
  const std::string text =
      "Date,Open,High,Low,Close,Volume\n"
      "2021-01-04,100.123456789,102.99,99.001,101.5,5000\n"
      "2021-01-05,101.5,103.0,100.25,102.75,6000\n";
  auto prices = parse_prices(std::string_view(text));
  auto reparsed = parse_prices(std::string_view(to_csv(prices)));
  REQUIRE(reparsed.size() == prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    CHECK(reparsed[i].date == prices[i].date);
    CHECK(reparsed[i].open == prices[i].open);
    CHECK(reparsed[i].high == prices[i].high);
    CHECK(reparsed[i].low == prices[i].low);
    CHECK(reparsed[i].close == prices[i].close);
    CHECK(reparsed[i].volume == prices[i].volume);
  }
}

TEST_CASE("tweet CSV round-trips awkward text") {
  const std::string text =
      "date,ticker,company,text\n"
      "2021-01-04,TSLA,Tesla,\"has, comma and \"\"quotes\"\"\"\n";
  auto result = parse_tweets(std::string_view(text));
  REQUIRE(result.tweets.size() == 1);
  auto round = parse_tweets(std::string_view(to_csv(result.tweets)));
  REQUIRE(round.tweets.size() == 1);
  CHECK(round.tweets[0].text == result.tweets[0].text);
}

TEST_CASE("align summarizes tweet/price calendar overlap") {
  auto prices = parse_prices(std::string_view(
      "Date,Open,High,Low,Close,Volume\n"
      "2021-01-04,100,102,99,101,5000\n"
      "2021-01-06,101,103,100,102,5000\n"));
  auto tweets = parse_tweets(std::string_view(
      "date,ticker,company,text\n"
      "2021-01-03,TSLA,Tesla,before the window\n"
      "2021-01-04,TSLA,Tesla,on a trading day\n"
      "2021-01-05,TSLA,Tesla,between bars\n"
      "2021-01-05,TSLA,Tesla,same gap day again\n"
      "2021-01-07,TSLA,Tesla,after the window\n"));
  auto report = align(tweets.tweets, prices);
  CHECK(report.period_start.iso() == "2021-01-04");
  CHECK(report.period_end.iso() == "2021-01-06");
  CHECK(report.trading_day_count == 2);
  CHECK(report.tweet_days_outside_period == 2);
  CHECK(report.non_trading_tweet_days == 1);  // distinct dates, not tweets
}

TEST_CASE("align refuses empty input") {
  auto prices = parse_prices(std::string_view(
      "Date,Open,High,Low,Close,Volume\n2021-01-04,100,102,99,101,5000\n"));
  CHECK(code_of([&] { align({}, prices); }) == ErrorCode::empty_input);
}
