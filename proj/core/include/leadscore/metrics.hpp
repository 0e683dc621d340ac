#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leadscore/quarter.hpp"
#include "leadscore/snapshot.hpp"

namespace leadscore {

// One scored lead-week with its realized outcome, ready for ranking metrics.
struct ScoredOutcome {
  std::string lead_id;
  double score = 0.0;
  int label = 0;
  WeekIndex week;
  std::string segment;
};

// Tie-aware rank statistic: P(score+ > score-) + 0.5 * P(score+ = score-),
// computed with average ranks in O(n log n). Throws UndefinedMetricError on
// single-class input.
double roc_auc(std::span<const ScoredOutcome> scored);

// Cumulative gain curve: leads sorted by score descending (ties broken by
// lead_id so runs are reproducible), one point per prefix, (0,0) prepended.
// gain_score is the trapezoidal area under the curve.
struct GainCurve {
  std::vector<std::pair<double, double>> points;  // (fraction contacted, fraction of wins)
  double gain_score = 0.0;
};

GainCurve gain_curve(std::span<const ScoredOutcome> scored);

// Ranks leads by the seller's subjective rating instead of a model score.
// Every snapshot must carry seller_rating; leads without an outcome record
// are skipped, matching the labeling join.
std::vector<ScoredOutcome> seller_baseline(const SnapshotBatch& snapshots,
                                           const std::vector<OutcomeRecord>& outcomes,
                                           const std::string& segment_attribute);

enum class RankMetric { gain, auc };

std::string_view to_string(RankMetric metric);

struct EvalCell {
  double value = 0.0;
  bool defined = false;
  std::size_t n = 0;
  std::size_t positives = 0;
};

// Weekly-by-segment score table: one cell per (segment, week 1..13) plus a
// per-segment average over the defined cells.
struct EvalReport {
  std::string metric_name;
  std::vector<std::string> segments;  // sorted; also the column order
  std::map<std::string, std::array<EvalCell, kWeeksPerQuarter>> cells;
  std::map<std::string, EvalCell> averages;
};

EvalReport weekly_report(std::span<const ScoredOutcome> scored, RankMetric metric);

// Report CSV: `week,<segment...>` header, rows 1..13 then `average`, values
// with three fractional digits, undefined cells as NA.
void write_report_csv(std::ostream& out, const EvalReport& report);

// Gain-curve CSV: `fraction_contacted,fraction_wins`.
void write_gain_curve_csv(std::ostream& out, const GainCurve& curve);

}  // namespace leadscore
