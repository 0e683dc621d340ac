#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace leadscore {

// Fiscal quarter, taken to coincide with the calendar quarter. String form is
// "YYYYQn" and round-trips exactly.
struct Quarter {
  int year = 0;
  int index = 0;  // 1..4 when valid

  bool valid() const { return year >= 1 && year <= 9999 && index >= 1 && index <= 4; }

  std::string str() const;

  // Strict: accepts only a valid "YYYYQn", throws ParseError otherwise.
  static Quarter parse(std::string_view text);

  // Shape-only: accepts "YYYYQd" for any digit d, so out-of-range quarters can
  // be carried through parsing and reported by validate_batch.
  static std::optional<Quarter> parse_lenient(std::string_view text);

  // Calendar arithmetic over (year, index).
  Quarter minus_quarters(int n) const;
  Quarter plus_quarters(int n) const { return minus_quarters(-n); }

  auto operator<=>(const Quarter&) const = default;
};

// Week within a quarter. Valid range is 1..13; the value is stored as-is so
// that out-of-range input survives until validation.
struct WeekIndex {
  int value = 1;

  bool valid() const { return value >= 1 && value <= 13; }

  auto operator<=>(const WeekIndex&) const = default;
};

inline constexpr int kWeeksPerQuarter = 13;

// Maps a 1-based day of quarter into 7-day bins, clamped to week 13 so the
// trailing days of a 92-day quarter land in the last week.
WeekIndex week_of(int day_of_quarter);

}  // namespace leadscore
