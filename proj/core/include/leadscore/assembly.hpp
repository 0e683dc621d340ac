#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <vector>

#include "leadscore/snapshot.hpp"

namespace leadscore {

// A weekly snapshot joined with its lead's quarter-end outcome. Every
// snapshot of a lead carries the same label: 1 for won, 0 for lost or
// pending.
struct LabeledRow {
  LeadSnapshot snapshot;
  int label = 0;

  bool operator==(const LabeledRow&) const = default;
};

struct TrainingSet {
  std::vector<LabeledRow> rows;
  std::vector<Quarter> source_quarters;  // sorted, unique
  Quarter target_quarter;
};

// Which quarters feed a training set for a given target: the same quarter of
// the previous year (seasonality), the immediately preceding quarter
// (recency), plus any explicit extras.
struct CompositionPolicy {
  bool use_seasonality = true;
  bool use_recency = true;
  std::vector<Quarter> extra_quarters;
};

struct LabelResult {
  std::vector<LabeledRow> rows;
  std::size_t dropped_leads = 0;         // snapshots without an outcome record
  std::size_t excluded_post_win = 0;     // won-lead snapshots at/after the recorded win week
};

// Joins one quarter's snapshots with that quarter's outcomes. Leads missing
// from the outcome store are dropped and counted. When a won lead's outcome
// record carries a disposition week, snapshots at or after it are excluded;
// lost and pending leads keep every snapshot.
LabelResult label_snapshots(const SnapshotBatch& snapshots,
                            const std::vector<OutcomeRecord>& outcomes);

std::vector<Quarter> resolve_sources(Quarter target, const CompositionPolicy& policy);

// In-memory per-quarter stores, keyed by quarter.
struct DataStore {
  std::map<Quarter, SnapshotBatch> snapshots;
  std::map<Quarter, std::vector<OutcomeRecord>> outcomes;
};

struct ComposeResult {
  TrainingSet set;
  std::size_t dropped_leads = 0;
  std::size_t excluded_post_win = 0;
};

// Concatenates label_snapshots output for each resolved source quarter in
// ascending quarter order. Pure function of its inputs.
ComposeResult compose_training_set(Quarter target, const CompositionPolicy& policy,
                                   const DataStore& store);

// Training CSV: snapshot columns plus a trailing `label` column.
void write_training_csv(std::ostream& out, const std::vector<LabeledRow>& rows,
                        const SchemaSpec& schema);
std::vector<LabeledRow> read_training_csv(std::istream& in, const SchemaSpec& schema);

}  // namespace leadscore
