#include "leadscore/assembly.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "leadscore/csv.hpp"
#include "leadscore/errors.hpp"

namespace leadscore {

LabelResult label_snapshots(const SnapshotBatch& snapshots,
                            const std::vector<OutcomeRecord>& outcomes) {
  LabelResult result;
  if (snapshots.empty()) return result;
  if (outcomes.empty()) {
    throw ConfigError("no outcome records for quarter " + snapshots.front().quarter.str());
  }

  std::unordered_map<std::string, const OutcomeRecord*> by_lead;
  by_lead.reserve(outcomes.size());
  for (const auto& rec : outcomes) by_lead.emplace(rec.lead_id, &rec);

  std::set<std::string> dropped;
  for (const auto& snap : snapshots) {
    auto it = by_lead.find(snap.lead_id);
    if (it == by_lead.end()) {
      dropped.insert(snap.lead_id);
      continue;
    }
    const OutcomeRecord& outcome = *it->second;
    bool won = outcome.status == OutcomeStatus::won;
    if (won && outcome.week && snap.week.value >= outcome.week->value) {
      ++result.excluded_post_win;
      continue;
    }
    result.rows.push_back({snap, won ? 1 : 0});
  }
  result.dropped_leads = dropped.size();
  return result;
}

std::vector<Quarter> resolve_sources(Quarter target, const CompositionPolicy& policy) {
  std::set<Quarter> sources;
  if (policy.use_seasonality) sources.insert(target.minus_quarters(4));
  if (policy.use_recency) sources.insert(target.minus_quarters(1));
  for (const auto& q : policy.extra_quarters) sources.insert(q);
  sources.erase(target);
  if (sources.empty()) {
    throw PolicyError("composition policy resolves to no source quarters for target " +
                      target.str());
  }
  return {sources.begin(), sources.end()};
}

ComposeResult compose_training_set(Quarter target, const CompositionPolicy& policy,
                                   const DataStore& store) {
  ComposeResult result;
  result.set.target_quarter = target;
  result.set.source_quarters = resolve_sources(target, policy);

  for (const auto& quarter : result.set.source_quarters) {
    auto snaps = store.snapshots.find(quarter);
    auto outs = store.outcomes.find(quarter);
    if (snaps == store.snapshots.end() || snaps->second.empty()) {
      throw ConfigError("no snapshots for source quarter " + quarter.str());
    }
    if (outs == store.outcomes.end() || outs->second.empty()) {
      throw ConfigError("no outcomes for source quarter " + quarter.str());
    }
    auto labeled = label_snapshots(snaps->second, outs->second);
    result.dropped_leads += labeled.dropped_leads;
    result.excluded_post_win += labeled.excluded_post_win;
    result.set.rows.insert(result.set.rows.end(),
                           std::make_move_iterator(labeled.rows.begin()),
                           std::make_move_iterator(labeled.rows.end()));
  }

  auto positives = std::count_if(result.set.rows.begin(), result.set.rows.end(),
                                 [](const LabeledRow& r) { return r.label == 1; });
  if (result.set.rows.empty() || positives == 0 ||
      positives == static_cast<long>(result.set.rows.size())) {
    throw DegenerateLabelsError("training set for target " + target.str() +
                                " has labels of a single class");
  }
  return result;
}

void write_training_csv(std::ostream& out, const std::vector<LabeledRow>& rows,
                        const SchemaSpec& schema) {
  // Reuse the snapshot writer column-for-column, appending the label.
  std::ostringstream snapshot_text;
  SnapshotBatch batch;
  batch.reserve(rows.size());
  for (const auto& row : rows) batch.push_back(row.snapshot);
  write_snapshot_csv(snapshot_text, batch, schema);

  std::istringstream lines(snapshot_text.str());
  std::string line;
  std::getline(lines, line);
  out << line << ",label\n";
  for (const auto& row : rows) {
    std::getline(lines, line);
    out << line << ',' << row.label << '\n';
  }
}

std::vector<LabeledRow> read_training_csv(std::istream& in, const SchemaSpec& schema) {
  // Split the label column off, then run the snapshot parser on the rest.
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream lines(text);
  std::ostringstream snapshot_text;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.rfind(',');
    if (comma == std::string::npos) throw ParseError("missing label column", line_no);
    std::string last = line.substr(comma + 1);
    if (header) {
      if (last != "label") throw SchemaError("training file must end with a label column");
      header = false;
    } else {
      if (last == "0") {
        labels.push_back(0);
      } else if (last == "1") {
        labels.push_back(1);
      } else {
        throw ParseError("label must be 0 or 1, got '" + last + "'", line_no);
      }
    }
    snapshot_text << line.substr(0, comma) << '\n';
  }
  if (header) throw SchemaError("training file has no header row");

  std::istringstream snapshot_in(snapshot_text.str());
  SnapshotBatch batch = parse_snapshot_csv(snapshot_in, schema);
  if (batch.size() != labels.size()) {
    throw ParseError("row/label count mismatch in training file");
  }
  std::vector<LabeledRow> rows;
  rows.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    rows.push_back({std::move(batch[i]), labels[i]});
  }
  return rows;
}

}  // namespace leadscore
