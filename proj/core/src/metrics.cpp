#include "leadscore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

#include "leadscore/csv.hpp"
#include "leadscore/errors.hpp"

namespace leadscore {

namespace {

void check_scores(std::span<const ScoredOutcome> scored) {
  for (const auto& s : scored) {
    if (!std::isfinite(s.score)) {
      throw DomainError("non-finite score for lead " + s.lead_id);
    }
    if (s.label != 0 && s.label != 1) {
      throw DomainError("label must be 0 or 1 for lead " + s.lead_id);
    }
  }
}

}  // namespace

double roc_auc(std::span<const ScoredOutcome> scored) {
  check_scores(scored);
  std::size_t positives = 0;
  for (const auto& s : scored) positives += s.label;
  std::size_t negatives = scored.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("AUC undefined: input has a single class (" +
                               std::to_string(positives) + " positives of " +
                               std::to_string(scored.size()) + ")");
  }

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scored[a].score < scored[b].score; });

  // Average rank within each tie group; ranks are 1-based.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scored[order[j + 1]].score == scored[order[i]].score) ++j;
    double rank = static_cast<double>(i + 1 + j + 1) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (scored[order[k]].label == 1) positive_rank_sum += rank;
    }
    i = j + 1;
  }
  double np = static_cast<double>(positives);
  double nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1) / 2.0) / (np * nn);
}

GainCurve gain_curve(std::span<const ScoredOutcome> scored) {
  check_scores(scored);
  if (scored.empty()) throw UndefinedMetricError("gain curve undefined on empty input");
  std::size_t total_positives = 0;
  for (const auto& s : scored) total_positives += s.label;
  if (total_positives == 0) {
    throw UndefinedMetricError("gain curve undefined: no positive outcomes");
  }

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scored[a].score != scored[b].score) return scored[a].score > scored[b].score;
    return scored[a].lead_id < scored[b].lead_id;
  });

  GainCurve curve;
  curve.points.reserve(scored.size() + 1);
  curve.points.emplace_back(0.0, 0.0);
  double n = static_cast<double>(scored.size());
  std::size_t covered = 0;
  double area = 0.0;
  double prev_y = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    covered += scored[order[k]].label;
    double x = static_cast<double>(k + 1) / n;
    double y = static_cast<double>(covered) / static_cast<double>(total_positives);
    area += (y + prev_y) / 2.0 / n;
    curve.points.emplace_back(x, y);
    prev_y = y;
  }
  curve.gain_score = area;
  return curve;
}

std::vector<ScoredOutcome> seller_baseline(const SnapshotBatch& snapshots,
                                           const std::vector<OutcomeRecord>& outcomes,
                                           const std::string& segment_attribute) {
  std::map<std::string, const OutcomeRecord*> by_lead;
  for (const auto& rec : outcomes) by_lead.emplace(rec.lead_id, &rec);

  std::set<std::string> missing_rating;
  for (const auto& snap : snapshots) {
    if (!snap.continuous.count("seller_rating")) missing_rating.insert(snap.lead_id);
  }
  if (!missing_rating.empty()) {
    std::string ids;
    for (const auto& id : missing_rating) {
      if (!ids.empty()) ids += ", ";
      ids += id;
    }
    throw DomainError("seller_rating missing for leads: " + ids);
  }

  std::vector<ScoredOutcome> scored;
  scored.reserve(snapshots.size());
  for (const auto& snap : snapshots) {
    auto it = by_lead.find(snap.lead_id);
    if (it == by_lead.end()) continue;
    ScoredOutcome s;
    s.lead_id = snap.lead_id;
    s.score = snap.continuous.at("seller_rating");
    s.label = it->second->status == OutcomeStatus::won ? 1 : 0;
    s.week = snap.week;
    auto seg = snap.categoricals.find(segment_attribute);
    s.segment = seg == snap.categoricals.end() ? std::string() : seg->second;
    scored.push_back(std::move(s));
  }
  return scored;
}

std::string_view to_string(RankMetric metric) {
  return metric == RankMetric::gain ? "gain" : "auc";
}

EvalReport weekly_report(std::span<const ScoredOutcome> scored, RankMetric metric) {
  check_scores(scored);
  std::map<std::pair<std::string, int>, std::vector<ScoredOutcome>> groups;
  for (const auto& s : scored) {
    if (!s.week.valid()) {
      throw DomainError("week " + std::to_string(s.week.value) + " out of 1..13 for lead " +
                        s.lead_id);
    }
    groups[{s.segment, s.week.value}].push_back(s);
  }

  EvalReport report;
  report.metric_name = to_string(metric);
  std::set<std::string> segments;
  for (const auto& [key, _] : groups) segments.insert(key.first);
  report.segments.assign(segments.begin(), segments.end());

  for (const auto& segment : report.segments) {
    auto& row = report.cells[segment];
    EvalCell total;
    double sum = 0.0;
    std::size_t defined = 0;
    for (int week = 1; week <= kWeeksPerQuarter; ++week) {
      EvalCell cell;
      auto it = groups.find({segment, week});
      if (it != groups.end()) {
        const auto& group = it->second;
        cell.n = group.size();
        for (const auto& s : group) cell.positives += s.label;
        bool ok = metric == RankMetric::gain
                      ? cell.positives >= 1
                      : (cell.positives >= 1 && cell.positives < cell.n);
        if (ok) {
          cell.value = metric == RankMetric::gain ? gain_curve(group).gain_score : roc_auc(group);
          cell.defined = true;
          sum += cell.value;
          ++defined;
        }
      }
      total.n += cell.n;
      total.positives += cell.positives;
      row[week - 1] = cell;
    }
    if (defined > 0) {
      total.value = sum / static_cast<double>(defined);
      total.defined = true;
    }
    report.averages[segment] = total;
  }
  return report;
}

namespace {

std::string cell_text(const EvalCell& cell) {
  if (!cell.defined) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", cell.value);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "week";
  for (const auto& segment : report.segments) out << ',' << segment;
  out << '\n';
  for (int week = 1; week <= kWeeksPerQuarter; ++week) {
    out << week;
    for (const auto& segment : report.segments) {
      out << ',' << cell_text(report.cells.at(segment)[week - 1]);
    }
    out << '\n';
  }
  out << "average";
  for (const auto& segment : report.segments) out << ',' << cell_text(report.averages.at(segment));
  out << '\n';
}

void write_gain_curve_csv(std::ostream& out, const GainCurve& curve) {
  out << "fraction_contacted,fraction_wins\n";
  for (const auto& [x, y] : curve.points) {
    out << format_double(x) << ',' << format_double(y) << '\n';
  }
}

}  // namespace leadscore
