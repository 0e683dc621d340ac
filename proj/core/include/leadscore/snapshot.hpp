#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leadscore/quarter.hpp"

namespace leadscore {

// One lead's attribute vector as observed in one week of one quarter.
// Attribute values live in exactly one of the two maps; the week column is
// pipeline state, not a feature.
struct LeadSnapshot {
  std::string lead_id;
  Quarter quarter;
  WeekIndex week;
  std::map<std::string, std::string> categoricals;
  std::map<std::string, double> continuous;

  bool operator==(const LeadSnapshot&) const = default;
};

using SnapshotBatch = std::vector<LeadSnapshot>;

enum class OutcomeStatus { won, lost, pending };

std::string_view to_string(OutcomeStatus status);
OutcomeStatus parse_status(std::string_view text);  // lowercase won/lost/pending only

// Quarter-end disposition of a lead. `week` is the disposition week when the
// source recorded one; most feeds leave it unset.
struct OutcomeRecord {
  std::string lead_id;
  Quarter quarter;
  OutcomeStatus status = OutcomeStatus::pending;
  std::optional<WeekIndex> week;

  bool operator==(const OutcomeRecord&) const = default;
};

enum class ExtraColumnPolicy { ignore, reject };

// Declares how snapshot CSV columns route into a LeadSnapshot. lead_id,
// quarter and week are always present and always required.
struct SchemaSpec {
  std::vector<std::string> categorical_columns;
  std::vector<std::string> continuous_columns;
  ExtraColumnPolicy extra_columns = ExtraColumnPolicy::ignore;

  // Throws SchemaError unless both sets are non-empty and disjoint.
  void check() const;
};

}  // namespace leadscore
