#include "leadscore/csv.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "leadscore/errors.hpp"

namespace leadscore {

namespace {

// Minimal RFC 4180 field handling: quoted fields may contain commas and
// doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && current.empty()) {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(std::move(current));
  return fields;
}

void write_csv_field(std::ostream& out, const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) {
    out << value;
    return;
  }
  out << '"';
  for (char c : value) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

int parse_int(const std::string& text, const char* what, std::size_t line_no) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(std::string("unparseable ") + what + " '" + text + "'", line_no);
  }
  return value;
}

double parse_real(const std::string& text, const std::string& column, std::size_t line_no) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("unparseable continuous value '" + text + "' in column " + column, line_no);
  }
  return value;
}

Quarter parse_quarter_field(const std::string& text, std::size_t line_no) {
  auto q = Quarter::parse_lenient(text);
  if (!q) throw ParseError("unparseable quarter '" + text + "'", line_no);
  return *q;
}

struct ColumnRoute {
  enum Kind { lead_id, quarter, week, categorical, continuous, skip } kind;
  std::string name;
};

}  // namespace

std::string_view to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::won: return "won";
    case OutcomeStatus::lost: return "lost";
    case OutcomeStatus::pending: return "pending";
  }
  return "pending";
}

OutcomeStatus parse_status(std::string_view text) {
  if (text == "won") return OutcomeStatus::won;
  if (text == "lost") return OutcomeStatus::lost;
  if (text == "pending") return OutcomeStatus::pending;
  throw ParseError("invalid status '" + std::string(text) + "', expected won|lost|pending");
}

void SchemaSpec::check() const {
  if (categorical_columns.empty() && continuous_columns.empty()) {
    throw SchemaError("schema declares no attribute columns");
  }
  std::set<std::string> seen;
  for (const auto& name : categorical_columns) {
    if (!seen.insert(name).second) throw SchemaError("schema column '" + name + "' listed twice");
  }
  for (const auto& name : continuous_columns) {
    if (!seen.insert(name).second) {
      throw SchemaError("schema column '" + name + "' is both categorical and continuous");
    }
  }
  for (const char* core : {"lead_id", "quarter", "week"}) {
    if (seen.count(core)) throw SchemaError(std::string("schema reuses core column '") + core + "'");
  }
}

SnapshotBatch parse_snapshot_csv(std::istream& in, const SchemaSpec& schema) {
  schema.check();
  std::string line;
  if (!read_line(in, line)) throw SchemaError("snapshot file has no header row");
  auto header = split_csv_line(line, 1);

  std::vector<ColumnRoute> routes(header.size());
  std::set<std::string> found;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& name = header[i];
    if (!found.insert(name).second) throw SchemaError("duplicate column '" + name + "' in header");
    if (name == "lead_id") {
      routes[i] = {ColumnRoute::lead_id, name};
    } else if (name == "quarter") {
      routes[i] = {ColumnRoute::quarter, name};
    } else if (name == "week") {
      routes[i] = {ColumnRoute::week, name};
    } else if (std::count(schema.categorical_columns.begin(), schema.categorical_columns.end(), name)) {
      routes[i] = {ColumnRoute::categorical, name};
    } else if (std::count(schema.continuous_columns.begin(), schema.continuous_columns.end(), name)) {
      routes[i] = {ColumnRoute::continuous, name};
    } else if (schema.extra_columns == ExtraColumnPolicy::reject) {
      throw SchemaError("unexpected column '" + name + "'");
    } else {
      routes[i] = {ColumnRoute::skip, name};
    }
  }
  for (const char* core : {"lead_id", "quarter", "week"}) {
    if (!found.count(core)) throw SchemaError(std::string("missing required column '") + core + "'");
  }
  for (const auto& name : schema.categorical_columns) {
    if (!found.count(name)) throw SchemaError("missing required column '" + name + "'");
  }
  for (const auto& name : schema.continuous_columns) {
    if (!found.count(name)) throw SchemaError("missing required column '" + name + "'");
  }

  SnapshotBatch batch;
  std::map<std::tuple<std::string, Quarter, int>, std::size_t> first_seen;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    LeadSnapshot snap;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::string& value = fields[i];
      switch (routes[i].kind) {
        case ColumnRoute::lead_id:
          if (value.empty()) throw ParseError("empty lead_id", line_no);
          snap.lead_id = value;
          break;
        case ColumnRoute::quarter:
          snap.quarter = parse_quarter_field(value, line_no);
          break;
        case ColumnRoute::week:
          snap.week = WeekIndex{parse_int(value, "week", line_no)};
          break;
        case ColumnRoute::categorical:
          if (!value.empty()) snap.categoricals.emplace(routes[i].name, value);
          break;
        case ColumnRoute::continuous:
          if (!value.empty()) {
            snap.continuous.emplace(routes[i].name, parse_real(value, routes[i].name, line_no));
          }
          break;
        case ColumnRoute::skip:
          break;
      }
    }
    auto key = std::make_tuple(snap.lead_id, snap.quarter, snap.week.value);
    auto [it, inserted] = first_seen.emplace(key, line_no);
    if (!inserted) {
      throw DuplicateError("duplicate snapshot (" + snap.lead_id + ", " + snap.quarter.str() +
                           ", week " + std::to_string(snap.week.value) + ") at lines " +
                           std::to_string(it->second) + " and " + std::to_string(line_no));
    }
    batch.push_back(std::move(snap));
  }
  return batch;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_snapshot_csv(std::ostream& out, const SnapshotBatch& batch, const SchemaSpec& schema) {
  schema.check();
  out << "lead_id,quarter,week";
  for (const auto& name : schema.categorical_columns) out << ',' << name;
  for (const auto& name : schema.continuous_columns) out << ',' << name;
  out << '\n';
  for (const auto& snap : batch) {
    write_csv_field(out, snap.lead_id);
    out << ',' << snap.quarter.str() << ',' << snap.week.value;
    for (const auto& name : schema.categorical_columns) {
      out << ',';
      auto it = snap.categoricals.find(name);
      if (it != snap.categoricals.end()) write_csv_field(out, it->second);
    }
    for (const auto& name : schema.continuous_columns) {
      out << ',';
      auto it = snap.continuous.find(name);
      if (it != snap.continuous.end()) out << format_double(it->second);
    }
    out << '\n';
  }
}

std::vector<OutcomeRecord> parse_outcome_csv(std::istream& in) {
  std::string line;
  if (!read_line(in, line)) throw SchemaError("outcome file has no header row");
  auto header = split_csv_line(line, 1);
  bool has_week = header.size() == 4 && header[3] == "week";
  if (!(header.size() == 3 || has_week) || header[0] != "lead_id" || header[1] != "quarter" ||
      header[2] != "status") {
    throw SchemaError("outcome header must be lead_id,quarter,status[,week]");
  }

  std::vector<OutcomeRecord> records;
  std::map<std::pair<std::string, Quarter>, std::size_t> first_seen;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    OutcomeRecord rec;
    if (fields[0].empty()) throw ParseError("empty lead_id", line_no);
    rec.lead_id = fields[0];
    rec.quarter = parse_quarter_field(fields[1], line_no);
    try {
      rec.status = parse_status(fields[2]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (has_week && !fields[3].empty()) {
      rec.week = WeekIndex{parse_int(fields[3], "week", line_no)};
    }
    auto key = std::make_pair(rec.lead_id, rec.quarter);
    auto [it, inserted] = first_seen.emplace(key, line_no);
    if (!inserted) {
      throw DuplicateError("duplicate outcome (" + rec.lead_id + ", " + rec.quarter.str() +
                           ") at lines " + std::to_string(it->second) + " and " +
                           std::to_string(line_no));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_outcome_csv(std::ostream& out, const std::vector<OutcomeRecord>& records) {
  bool any_week = std::any_of(records.begin(), records.end(),
                              [](const OutcomeRecord& r) { return r.week.has_value(); });
  out << (any_week ? "lead_id,quarter,status,week" : "lead_id,quarter,status") << '\n';
  for (const auto& rec : records) {
    write_csv_field(out, rec.lead_id);
    out << ',' << rec.quarter.str() << ',' << to_string(rec.status);
    if (any_week) {
      out << ',';
      if (rec.week) out << rec.week->value;
    }
    out << '\n';
  }
}

ValidationReport validate_batch(const SnapshotBatch& batch, const SchemaSpec& schema) {
  ValidationReport report;
  std::set<std::tuple<std::string, Quarter, int>> keys;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& snap = batch[i];
    std::size_t row = i + 1;
    auto flag = [&](std::string message) { report.violations.push_back({row, std::move(message)}); };

    if (!snap.quarter.valid()) flag("unknown quarter '" + snap.quarter.str() + "'");
    if (!snap.week.valid()) {
      flag("week " + std::to_string(snap.week.value) + " out of 1..13");
    }
    auto age = snap.continuous.find("lead_age");
    if (age != snap.continuous.end() && age->second < 0) flag("lead_age < 0");
    auto rating = snap.continuous.find("seller_rating");
    if (rating != snap.continuous.end() && (rating->second < 0 || rating->second > 1)) {
      flag("seller_rating outside [0,1]");
    }
    for (const auto& [name, _] : snap.categoricals) {
      if (snap.continuous.count(name)) flag("attribute '" + name + "' in both maps");
      if (!std::count(schema.categorical_columns.begin(), schema.categorical_columns.end(), name)) {
        flag("categorical attribute '" + name + "' not in schema");
      }
    }
    for (const auto& [name, _] : snap.continuous) {
      if (!std::count(schema.continuous_columns.begin(), schema.continuous_columns.end(), name)) {
        flag("continuous attribute '" + name + "' not in schema");
      }
    }
    if (!keys.insert(std::make_tuple(snap.lead_id, snap.quarter, snap.week.value)).second) {
      flag("duplicate (lead_id, quarter, week)");
    }
  }
  return report;
}

}  // namespace leadscore
