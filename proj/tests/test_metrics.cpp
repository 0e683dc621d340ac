#include <cmath>
#include <sstream>

#include "doctest.h"
#include "leadscore/errors.hpp"
#include "leadscore/metrics.hpp"
#include "leadscore/rng.hpp"

using namespace leadscore;

namespace {

std::vector<ScoredOutcome> scored_from(const std::vector<double>& scores,
                                       const std::vector<int>& labels) {
  std::vector<ScoredOutcome> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.push_back({"L" + std::to_string(i), scores[i], labels[i], WeekIndex{1}, "seg"});
  }
  return out;
}

// Independent oracle: count concordant pairs, ties at half weight.
double brute_force_auc(const std::vector<ScoredOutcome>& scored) {
  double concordant = 0.0;
  std::size_t pairs = 0;
  for (const auto& pos : scored) {
    if (pos.label != 1) continue;
    for (const auto& neg : scored) {
      if (neg.label != 0) continue;
      ++pairs;
      if (pos.score > neg.score) {
        concordant += 1.0;
      } else if (pos.score == neg.score) {
        concordant += 0.5;
      }
    }
  }
  return concordant / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("AUC fixture: three of four pairs concordant") {
  auto scored = scored_from({0.9, 0.8, 0.7, 0.6}, {1, 0, 1, 0});
  CHECK(roc_auc(scored) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(brute_force_auc(scored) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("AUC endpoints: perfect separation and all ties") {
  CHECK(roc_auc(scored_from({0.9, 0.8, 0.3, 0.2}, {1, 1, 0, 0})) == doctest::Approx(1.0));
  CHECK(roc_auc(scored_from({0.5, 0.5, 0.5, 0.5}, {1, 1, 0, 0})) == doctest::Approx(0.5));
}

TEST_CASE("AUC refuses single-class input") {
  CHECK_THROWS_AS(roc_auc(scored_from({0.9, 0.8}, {1, 1})), UndefinedMetricError);
  CHECK_THROWS_AS(roc_auc(scored_from({0.9, 0.8}, {0, 0})), UndefinedMetricError);
  CHECK_THROWS_AS(roc_auc({}), UndefinedMetricError);
}

TEST_CASE("rank AUC equals pairwise brute force on tie-heavy instances") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + rng.next_below(199);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool saw[2] = {false, false};
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid injects plenty of exact ties.
      scores[i] = static_cast<double>(rng.next_below(8)) / 7.0;
      labels[i] = static_cast<int>(rng.next_below(2));
      saw[labels[i]] = true;
    }
    if (!saw[0]) labels[0] = 0;
    if (!saw[1]) labels[n - 1] = 1;
    auto scored = scored_from(scores, labels);
    CHECK(std::abs(roc_auc(scored) - brute_force_auc(scored)) <= 1e-12);
  }
}

TEST_CASE("AUC and gain score are invariant under monotone transforms") {
  SplitMix64 rng(11);
  std::vector<double> scores(60);
  std::vector<int> labels(60);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = static_cast<double>(rng.next_below(10)) / 9.0;
    labels[i] = rng.next_unit() < 0.3 ? 1 : 0;
  }
  labels[0] = 1;
  labels[1] = 0;
  auto base = scored_from(scores, labels);
  auto transformed = base;
  for (auto& s : transformed) s.score = std::exp(2.0 * s.score + 1.0);

  CHECK(roc_auc(transformed) == doctest::Approx(roc_auc(base)).epsilon(1e-12));
  CHECK(gain_curve(transformed).gain_score ==
        doctest::Approx(gain_curve(base).gain_score).epsilon(1e-12));
}

TEST_CASE("gain curve fixture: points and trapezoidal score") {
  auto curve = gain_curve(scored_from({0.9, 0.8, 0.7, 0.6}, {1, 0, 1, 0}));
  REQUIRE(curve.points.size() == 5);
  CHECK(curve.points[0] == std::pair{0.0, 0.0});
  CHECK(curve.points[1] == std::pair{0.25, 0.5});
  CHECK(curve.points[2] == std::pair{0.5, 0.5});
  CHECK(curve.points[3] == std::pair{0.75, 1.0});
  CHECK(curve.points[4] == std::pair{1.0, 1.0});
  CHECK(curve.gain_score == doctest::Approx(0.625).epsilon(1e-12));

  auto perfect = gain_curve(scored_from({0.9, 0.8, 0.7, 0.6}, {1, 1, 0, 0}));
  CHECK(perfect.gain_score == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("perfect-ranking gain score is 1 - rate/2") {
  for (double rate : {0.1, 0.25, 0.5}) {
    std::size_t n = 40;
    auto positives = static_cast<std::size_t>(rate * n);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = 1.0 - static_cast<double>(i) / n;
      labels[i] = i < positives ? 1 : 0;
    }
    auto curve = gain_curve(scored_from(scores, labels));
    CHECK(curve.gain_score == doctest::Approx(1.0 - rate / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("random scores drift the gain score to one half") {
  SplitMix64 rng(99);
  std::size_t n = 10000;
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.next_unit();
    labels[i] = rng.next_unit() < 0.2 ? 1 : 0;
  }
  labels[0] = 1;
  auto curve = gain_curve(scored_from(scores, labels));
  CHECK(curve.gain_score == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("gain curve needs at least one positive") {
  CHECK_THROWS_AS(gain_curve(scored_from({0.4, 0.2}, {0, 0})), UndefinedMetricError);
  CHECK_THROWS_AS(gain_curve({}), UndefinedMetricError);
}

TEST_CASE("gain curve is monotone with pinned endpoints") {
  SplitMix64 rng(5);
  std::vector<double> scores(200);
  std::vector<int> labels(200);
  for (std::size_t i = 0; i < 200; ++i) {
    scores[i] = static_cast<double>(rng.next_below(20)) / 19.0;
    labels[i] = rng.next_unit() < 0.4 ? 1 : 0;
  }
  labels[7] = 1;
  auto curve = gain_curve(scored_from(scores, labels));
  CHECK(curve.points.front() == std::pair{0.0, 0.0});
  CHECK(curve.points.back().first == doctest::Approx(1.0));
  CHECK(curve.points.back().second == doctest::Approx(1.0));
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].first > curve.points[i - 1].first);
    CHECK(curve.points[i].second >= curve.points[i - 1].second);
  }
  CHECK(curve.gain_score >= 0.0);
  CHECK(curve.gain_score <= 1.0);
}

TEST_CASE("tie ordering is deterministic by lead_id") {
  std::vector<ScoredOutcome> scored{{"B", 0.5, 1, WeekIndex{1}, ""},
                                    {"A", 0.5, 0, WeekIndex{1}, ""},
                                    {"C", 0.5, 0, WeekIndex{1}, ""}};
  auto curve = gain_curve(scored);
  // A sorts before B: the positive lands at prefix 2 of 3.
  CHECK(curve.points[1].second == doctest::Approx(0.0));
  CHECK(curve.points[2].second == doctest::Approx(1.0));
}

TEST_CASE("seller baseline scores ratings verbatim") {
  SnapshotBatch snaps;
  std::vector<OutcomeRecord> outcomes;
  auto add = [&](const std::string& id, double rating, OutcomeStatus status) {
    LeadSnapshot s;
    s.lead_id = id;
    s.quarter = Quarter{2014, 1};
    s.week = WeekIndex{3};
    s.categoricals["geography"] = "GCG";
    s.continuous["seller_rating"] = rating;
    snaps.push_back(s);
    outcomes.push_back({id, s.quarter, status, {}});
  };
  add("L1", 0.9, OutcomeStatus::won);
  add("L2", 0.1, OutcomeStatus::lost);

  auto scored = seller_baseline(snaps, outcomes, "geography");
  REQUIRE(scored.size() == 2);
  CHECK(scored[0].score == 0.9);
  CHECK(scored[0].label == 1);
  CHECK(scored[0].segment == "GCG");
  CHECK(roc_auc(scored) == doctest::Approx(1.0));

  // Constant ratings tie everything: AUC one half.
  for (auto& s : snaps) s.continuous["seller_rating"] = 0.4;
  CHECK(roc_auc(seller_baseline(snaps, outcomes, "geography")) == doctest::Approx(0.5));
}

TEST_CASE("missing seller ratings are reported by lead id") {
  SnapshotBatch snaps;
  LeadSnapshot s;
  s.lead_id = "L77";
  s.quarter = Quarter{2014, 1};
  s.week = WeekIndex{1};
  snaps.push_back(s);
  try {
    seller_baseline(snaps, {{"L77", s.quarter, OutcomeStatus::lost, {}}}, "geography");
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("L77") != std::string::npos);
  }
}

namespace {

std::vector<ScoredOutcome> synthetic_weekly(SplitMix64& rng, int segments, bool drop_week5_pos) {
  std::vector<ScoredOutcome> scored;
  for (int seg = 0; seg < segments; ++seg) {
    std::string name = "G" + std::to_string(seg);
    for (int week = 1; week <= 13; ++week) {
      for (int i = 0; i < 30; ++i) {
        int label = rng.next_unit() < 0.3 ? 1 : 0;
        if (drop_week5_pos && seg == 0 && week == 5) label = 0;
        double score = 0.3 * label + rng.next_unit() * 0.7;
        scored.push_back({name + "_w" + std::to_string(week) + "_" + std::to_string(i), score,
                          label, WeekIndex{week}, name});
      }
      // Make sure every other cell has at least one of each class.
      if (!(drop_week5_pos && seg == 0 && week == 5)) {
        scored.push_back({name + "_pos" + std::to_string(week), 0.9, 1, WeekIndex{week}, name});
        scored.push_back({name + "_neg" + std::to_string(week), 0.1, 0, WeekIndex{week}, name});
      }
    }
  }
  return scored;
}

}  // namespace

TEST_CASE("weekly report shape, NA cells, and average recomputation") {
  SplitMix64 rng(321);
  auto scored = synthetic_weekly(rng, 2, true);
  auto report = weekly_report(scored, RankMetric::gain);

  REQUIRE(report.segments == std::vector<std::string>{"G0", "G1"});
  CHECK(report.metric_name == "gain");

  // Zero-positive cell is undefined; the average covers the other 12.
  CHECK_FALSE(report.cells.at("G0")[4].defined);
  CHECK(report.cells.at("G1")[4].defined);

  for (const auto& segment : report.segments) {
    double sum = 0;
    std::size_t defined = 0;
    for (const auto& cell : report.cells.at(segment)) {
      if (cell.defined) {
        sum += cell.value;
        ++defined;
      }
    }
    CHECK(defined == (segment == "G0" ? 12 : 13));
    CHECK(report.averages.at(segment).value ==
          doctest::Approx(sum / defined).epsilon(1e-12));
  }

  // Cross-check one cell against an independent filter + metric call.
  std::vector<ScoredOutcome> cell_rows;
  for (const auto& s : scored) {
    if (s.segment == "G1" && s.week.value == 7) cell_rows.push_back(s);
  }
  CHECK(report.cells.at("G1")[6].value ==
        doctest::Approx(gain_curve(cell_rows).gain_score).epsilon(1e-12));
  CHECK(report.cells.at("G1")[6].n == cell_rows.size());
}

TEST_CASE("weekly report under AUC marks single-class cells undefined") {
  SplitMix64 rng(55);
  auto scored = synthetic_weekly(rng, 1, true);
  auto report = weekly_report(scored, RankMetric::auc);
  CHECK(report.metric_name == "auc");
  CHECK_FALSE(report.cells.at("G0")[4].defined);
  CHECK(report.cells.at("G0")[0].defined);
}

TEST_CASE("report csv carries 13 week rows plus an average row at 3 decimals") {
  SplitMix64 rng(777);
  auto scored = synthetic_weekly(rng, 2, true);
  auto report = weekly_report(scored, RankMetric::gain);

  std::ostringstream out;
  write_report_csv(out, report);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "week,G0,G1");
  int week = 0;
  while (std::getline(lines, line)) {
    ++week;
    auto first_comma = line.find(',');
    std::string label = line.substr(0, first_comma);
    if (week <= 13) {
      CHECK(label == std::to_string(week));
    } else {
      CHECK(label == "average");
    }
    // Cells: either NA or exactly three fractional digits.
    std::istringstream cells(line.substr(first_comma + 1));
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      if (cell == "NA") continue;
      auto dot = cell.find('.');
      REQUIRE(dot != std::string::npos);
      CHECK(cell.size() - dot - 1 == 3);
    }
  }
  CHECK(week == 14);
}

TEST_CASE("gain curve csv layout") {
  auto curve = gain_curve(scored_from({0.9, 0.8}, {1, 0}));
  std::ostringstream out;
  write_gain_curve_csv(out, curve);
  CHECK(out.str() ==
        "fraction_contacted,fraction_wins\n0,0\n0.5,1\n1,1\n");
}
