#include <sstream>

#include "doctest.h"
#include "leadscore/assembly.hpp"
#include "leadscore/errors.hpp"
#include "leadscore/rng.hpp"

using namespace leadscore;

namespace {

LeadSnapshot make_snapshot(const std::string& id, Quarter q, int week,
                           const std::string& stage = "S1") {
  LeadSnapshot snap;
  snap.lead_id = id;
  snap.quarter = q;
  snap.week = WeekIndex{week};
  snap.categoricals["stage"] = stage;
  snap.continuous["lead_age"] = 10.0 * week;
  return snap;
}

constexpr Quarter kQ13_1{2013, 1};
constexpr Quarter kQ13_4{2013, 4};
constexpr Quarter kQ14_1{2014, 1};

}  // namespace

TEST_CASE("won lead keeps only the weeks before its recorded win week") {
  SnapshotBatch snaps;
  for (int w = 3; w <= 8; ++w) snaps.push_back(make_snapshot("L1", kQ13_1, w));
  std::vector<OutcomeRecord> outcomes{{"L1", kQ13_1, OutcomeStatus::won, WeekIndex{9}}};

  auto result = label_snapshots(snaps, outcomes);
  REQUIRE(result.rows.size() == 6);
  for (const auto& row : result.rows) CHECK(row.label == 1);
  CHECK(result.excluded_post_win == 0);

  // A stray snapshot at the win week itself is excluded.
  snaps.push_back(make_snapshot("L1", kQ13_1, 9));
  snaps.push_back(make_snapshot("L1", kQ13_1, 10));
  auto pruned = label_snapshots(snaps, outcomes);
  CHECK(pruned.rows.size() == 6);
  CHECK(pruned.excluded_post_win == 2);
}

TEST_CASE("won lead without a recorded week keeps every snapshot") {
  SnapshotBatch snaps;
  for (int w = 3; w <= 10; ++w) snaps.push_back(make_snapshot("L1", kQ13_1, w));
  std::vector<OutcomeRecord> outcomes{{"L1", kQ13_1, OutcomeStatus::won, {}}};
  auto result = label_snapshots(snaps, outcomes);
  CHECK(result.rows.size() == 8);
}

TEST_CASE("pending lead contributes thirteen negative rows") {
  SnapshotBatch snaps;
  for (int w = 1; w <= 13; ++w) snaps.push_back(make_snapshot("L2", kQ13_1, w));
  std::vector<OutcomeRecord> outcomes{{"L2", kQ13_1, OutcomeStatus::pending, {}}};
  auto result = label_snapshots(snaps, outcomes);
  REQUIRE(result.rows.size() == 13);
  for (const auto& row : result.rows) CHECK(row.label == 0);
}

TEST_CASE("lost lead with one snapshot yields one negative row") {
  SnapshotBatch snaps{make_snapshot("L3", kQ13_1, 5)};
  std::vector<OutcomeRecord> outcomes{{"L3", kQ13_1, OutcomeStatus::lost, {}}};
  auto result = label_snapshots(snaps, outcomes);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].label == 0);
}

TEST_CASE("leads without an outcome record are dropped and counted") {
  SnapshotBatch snaps{make_snapshot("L1", kQ13_1, 2), make_snapshot("L1", kQ13_1, 3),
                      make_snapshot("L9", kQ13_1, 2)};
  std::vector<OutcomeRecord> outcomes{{"L1", kQ13_1, OutcomeStatus::lost, {}}};
  auto result = label_snapshots(snaps, outcomes);
  CHECK(result.rows.size() == 2);
  CHECK(result.dropped_leads == 1);
}

TEST_CASE("empty snapshots are fine; missing outcomes are not") {
  CHECK(label_snapshots({}, {}).rows.empty());
  SnapshotBatch snaps{make_snapshot("L1", kQ13_1, 2)};
  CHECK_THROWS_AS(label_snapshots(snaps, {}), ConfigError);
}

TEST_CASE("resolve_sources follows the seasonality+recency policy") {
  CompositionPolicy both;
  CHECK(resolve_sources(kQ14_1, both) == std::vector<Quarter>{kQ13_1, kQ13_4});
  CHECK(resolve_sources(Quarter{2014, 2}, both) ==
        std::vector<Quarter>{Quarter{2013, 2}, kQ14_1});
  CHECK(resolve_sources(Quarter{2015, 3}, both) ==
        std::vector<Quarter>{Quarter{2014, 3}, Quarter{2015, 2}});

  CompositionPolicy recency_only;
  recency_only.use_seasonality = false;
  CHECK(resolve_sources(kQ14_1, recency_only) == std::vector<Quarter>{kQ13_4});

  CompositionPolicy none;
  none.use_seasonality = false;
  none.use_recency = false;
  CHECK_THROWS_AS(resolve_sources(kQ14_1, none), PolicyError);

  // Extras are merged; the target itself is always excluded.
  none.extra_quarters = {kQ13_1, kQ14_1, kQ13_1};
  CHECK(resolve_sources(kQ14_1, none) == std::vector<Quarter>{kQ13_1});
}

namespace {

DataStore two_quarter_store() {
  DataStore store;
  // 2013Q1: one won lead observed at week 9 with snapshots 3..8.
  for (int w = 3; w <= 8; ++w) {
    store.snapshots[kQ13_1].push_back(make_snapshot("W1", kQ13_1, w));
  }
  store.outcomes[kQ13_1].push_back({"W1", kQ13_1, OutcomeStatus::won, WeekIndex{9}});
  // 2013Q4: one pending lead with snapshots 1..13.
  for (int w = 1; w <= 13; ++w) {
    store.snapshots[kQ13_4].push_back(make_snapshot("P1", kQ13_4, w));
  }
  store.outcomes[kQ13_4].push_back({"P1", kQ13_4, OutcomeStatus::pending, {}});
  return store;
}

}  // namespace

TEST_CASE("compose concatenates per-quarter labels in quarter order") {
  auto store = two_quarter_store();
  auto composed = compose_training_set(kQ14_1, CompositionPolicy{}, store);
  CHECK(composed.set.rows.size() == 19);
  CHECK(composed.set.source_quarters == std::vector<Quarter>{kQ13_1, kQ13_4});
  CHECK(composed.set.target_quarter == kQ14_1);
  // Quarter order: the six won rows first, then the thirteen pending rows.
  for (std::size_t i = 0; i < 6; ++i) CHECK(composed.set.rows[i].label == 1);
  for (std::size_t i = 6; i < 19; ++i) CHECK(composed.set.rows[i].label == 0);

  // Determinism: byte-identical output on a second call.
  auto again = compose_training_set(kQ14_1, CompositionPolicy{}, store);
  CHECK(again.set.rows == composed.set.rows);
}

TEST_CASE("compose rejects missing quarters and one-class label sets") {
  auto store = two_quarter_store();
  store.snapshots.erase(kQ13_4);
  try {
    compose_training_set(kQ14_1, CompositionPolicy{}, store);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2013Q4") != std::string::npos);
  }

  // All-won store: degenerate labels.
  DataStore won_only;
  won_only.snapshots[kQ13_1].push_back(make_snapshot("W1", kQ13_1, 3));
  won_only.outcomes[kQ13_1].push_back({"W1", kQ13_1, OutcomeStatus::won, {}});
  won_only.snapshots[kQ13_4].push_back(make_snapshot("W2", kQ13_4, 3));
  won_only.outcomes[kQ13_4].push_back({"W2", kQ13_4, OutcomeStatus::won, {}});
  CHECK_THROWS_AS(compose_training_set(kQ14_1, CompositionPolicy{}, won_only),
                  DegenerateLabelsError);
}

TEST_CASE("composed row count matches an independent recount of the store") {
  SplitMix64 rng(7);
  DataStore store;
  std::map<std::pair<std::string, Quarter>, OutcomeRecord> outcome_index;
  for (Quarter q : {kQ13_1, kQ13_4}) {
    for (int i = 0; i < 40; ++i) {
      std::string id = "L" + q.str() + "_" + std::to_string(i);
      int creation = 1 + static_cast<int>(rng.next_below(13));
      double coin = rng.next_unit();
      OutcomeRecord rec{id, q, OutcomeStatus::pending, {}};
      if (coin < 0.3) {
        rec.status = OutcomeStatus::won;
        rec.week = WeekIndex{creation + static_cast<int>(rng.next_below(5)) + 1};
      } else if (coin < 0.6) {
        rec.status = OutcomeStatus::lost;
      }
      bool has_outcome = rng.next_unit() < 0.9;
      if (has_outcome) {
        store.outcomes[q].push_back(rec);
        outcome_index[{id, q}] = rec;
      }
      for (int w = creation; w <= 13; ++w) store.snapshots[q].push_back(make_snapshot(id, q, w));
    }
    // Guarantee both label classes per quarter.
    store.snapshots[q].push_back(make_snapshot("SURE_WIN", q, 1));
    store.outcomes[q].push_back({"SURE_WIN", q, OutcomeStatus::won, WeekIndex{2}});
    outcome_index[{"SURE_WIN", q}] = store.outcomes[q].back();
    store.snapshots[q].push_back(make_snapshot("SURE_LOSS", q, 1));
    store.outcomes[q].push_back({"SURE_LOSS", q, OutcomeStatus::lost, {}});
    outcome_index[{"SURE_LOSS", q}] = store.outcomes[q].back();
  }

  auto composed = compose_training_set(kQ14_1, CompositionPolicy{}, store);

  // Independent pass over the raw store.
  std::size_t expected = 0;
  for (const auto& [q, batch] : store.snapshots) {
    for (const auto& snap : batch) {
      auto it = outcome_index.find({snap.lead_id, q});
      if (it == outcome_index.end()) continue;
      const auto& rec = it->second;
      if (rec.status == OutcomeStatus::won && rec.week &&
          snap.week.value >= rec.week->value) {
        continue;
      }
      ++expected;
    }
  }
  CHECK(composed.set.rows.size() == expected);

  // Label purity: all rows of one lead in one quarter share a label.
  std::map<std::pair<std::string, Quarter>, int> first_label;
  for (const auto& row : composed.set.rows) {
    auto key = std::make_pair(row.snapshot.lead_id, row.snapshot.quarter);
    auto [it, inserted] = first_label.emplace(key, row.label);
    if (!inserted) CHECK(it->second == row.label);
  }

  // Replication structure: a won lead's row count equals its snapshots
  // strictly before the recorded win week.
  for (const auto& [key, rec] : outcome_index) {
    if (rec.status != OutcomeStatus::won || !rec.week) continue;
    std::size_t rows = 0;
    for (const auto& row : composed.set.rows) {
      if (row.snapshot.lead_id == key.first && row.snapshot.quarter == key.second) ++rows;
    }
    std::size_t snaps_before = 0;
    for (const auto& snap : store.snapshots.at(key.second)) {
      if (snap.lead_id == key.first && snap.week.value < rec.week->value) ++snaps_before;
    }
    CHECK(rows == snaps_before);
  }
}

TEST_CASE("training csv round-trips rows and labels") {
  SchemaSpec schema;
  schema.categorical_columns = {"stage"};
  schema.continuous_columns = {"lead_age"};

  std::vector<LabeledRow> rows;
  for (int w = 3; w <= 8; ++w) rows.push_back({make_snapshot("W1", kQ13_1, w), 1});
  rows.push_back({make_snapshot("P1", kQ13_4, 2), 0});

  std::ostringstream out;
  write_training_csv(out, rows, schema);
  CHECK(out.str().find("label") != std::string::npos);

  std::istringstream in(out.str());
  auto back = read_training_csv(in, schema);
  CHECK(back == rows);
}

TEST_CASE("training csv rejects bad labels") {
  SchemaSpec schema;
  schema.categorical_columns = {"stage"};
  schema.continuous_columns = {"lead_age"};
  std::istringstream in(
      "lead_id,quarter,week,stage,lead_age,label\n"
      "L1,2013Q1,3,S1,40,2\n");
  CHECK_THROWS_AS(read_training_csv(in, schema), ParseError);

  std::istringstream no_label("lead_id,quarter,week,stage,lead_age\nL1,2013Q1,3,S1,40\n");
  CHECK_THROWS_AS(read_training_csv(no_label, schema), SchemaError);
}
