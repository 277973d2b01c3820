#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace emostock {

// Calendar day. Stored as civil year/month/day, compared via serial day
// number (days since 1970-01-01). All dates in the pipeline go through this
// type; downstream code never compares date strings.
class Date {
 public:
  Date() = default;

  // Accepts "YYYY-MM-DD", optionally followed by 'T' or ' ' and a time-of-day
  // (the day part is kept). Rejects impossible calendar dates.
  static std::optional<Date> parse(std::string_view text);

  // Returns nullopt for impossible dates (e.g. Feb 30).
  static std::optional<Date> from_ymd(int year, int month, int day);

  int year() const { return year_; }
  int month() const { return month_; }
  int day() const { return day_; }

  // days since 1970-01-01
  std::int64_t serial() const;

  static Date from_serial(std::int64_t days);

  // 0 = Monday ... 6 = Sunday
  int weekday() const;
  bool is_weekend() const { return weekday() >= 5; }

  Date next_day() const { return from_serial(serial() + 1); }

  std::string iso() const;

  friend auto operator<=>(const Date& a, const Date& b) {
    return a.serial() <=> b.serial();
  }
  friend bool operator==(const Date& a, const Date& b) {
    return a.year_ == b.year_ && a.month_ == b.month_ && a.day_ == b.day_;
  }

 private:
  Date(int y, int m, int d) : year_(y), month_(m), day_(d) {}

  int year_ = 1970;
  int month_ = 1;
  int day_ = 1;
};

}  // namespace emostock
