#include "leadscore/quarter.hpp"

#include <cctype>

#include "leadscore/errors.hpp"

namespace leadscore {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::string Quarter::str() const {
  std::string out;
  out.reserve(6);
  int y = year;
  char buf[4];
  for (int i = 3; i >= 0; --i) {
    buf[i] = static_cast<char>('0' + y % 10);
    y /= 10;
  }
  out.append(buf, 4);
  out.push_back('Q');
  out.push_back(static_cast<char>('0' + index % 10));
  return out;
}

std::optional<Quarter> Quarter::parse_lenient(std::string_view text) {
  if (text.size() != 6 || text[4] != 'Q') return std::nullopt;
  if (!all_digits(text.substr(0, 4)) || !all_digits(text.substr(5, 1))) return std::nullopt;
  int y = 0;
  for (int i = 0; i < 4; ++i) y = y * 10 + (text[i] - '0');
  return Quarter{y, text[5] - '0'};
}

Quarter Quarter::parse(std::string_view text) {
  auto q = parse_lenient(text);
  if (!q || !q->valid()) {
    throw ParseError("invalid quarter '" + std::string(text) + "', expected YYYYQn with n in 1..4");
  }
  return *q;
}

Quarter Quarter::minus_quarters(int n) const {
  int linear = year * 4 + (index - 1) - n;
  Quarter out{linear / 4, linear % 4 + 1};
  if (linear < 0) throw DomainError("quarter arithmetic underflow before year 0");
  return out;
}

WeekIndex week_of(int day_of_quarter) {
  if (day_of_quarter < 1) {
    throw DomainError("day_of_quarter must be >= 1, got " + std::to_string(day_of_quarter));
  }
  int week = (day_of_quarter - 1) / 7 + 1;
  if (week > kWeeksPerQuarter) week = kWeeksPerQuarter;
  return WeekIndex{week};
}

}  // namespace leadscore
