#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "leadscore/snapshot.hpp"

namespace leadscore {

// Snapshot CSV: header `lead_id,quarter,week,<categoricals...>,<continuous...>`,
// UTF-8, comma separated. Empty cells mean "value absent" and produce no map
// entry. Row order is preserved.
SnapshotBatch parse_snapshot_csv(std::istream& in, const SchemaSpec& schema);

// Writes the batch back in schema column order. Continuous values use
// shortest-round-trip formatting so parse(write(b)) == b.
void write_snapshot_csv(std::ostream& out, const SnapshotBatch& batch, const SchemaSpec& schema);

// Outcome CSV: `lead_id,quarter,status` with lowercase status. An optional
// trailing `week` column carries the disposition week when the feed knows it.
std::vector<OutcomeRecord> parse_outcome_csv(std::istream& in);
void write_outcome_csv(std::ostream& out, const std::vector<OutcomeRecord>& records);

struct Violation {
  std::size_t row;  // 1-based data row index
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Report-only invariant check; parsing intentionally lets out-of-range
// quarters, weeks and negative ages through so they can be listed here.
struct ValidationReport {
  std::vector<Violation> violations;

  bool clean() const { return violations.empty(); }
};

ValidationReport validate_batch(const SnapshotBatch& batch, const SchemaSpec& schema);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace leadscore
