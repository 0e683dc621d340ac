#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leadscore/features.hpp"
#include "leadscore/metrics.hpp"
#include "leadscore/snapshot.hpp"

namespace leadscore {

// True logistic coefficients, either given explicitly (keys follow the
// generator's vocabulary terms; missing keys mean zero) or drawn once from
// the seed.
struct CoefficientSpec {
  bool explicit_coefficients = false;
  std::map<std::pair<std::string, std::string>, double> unary;
  std::map<std::string, double> continuous;
  std::map<std::pair<std::string, std::string>, double> interaction_categorical;
  std::map<std::string, double> interaction_continuous;
  double coefficient_scale = 0.8;  // stddev of drawn unary/continuous terms
};

struct GeneratorConfig {
  std::uint64_t seed = 42;
  int leads_per_quarter = 1000;
  std::vector<Quarter> quarters;
  std::map<std::string, int> categorical_cardinalities{
      {"deal_size", 3}, {"geography", 4}, {"industry", 5}, {"new_client", 2},
      {"owner", 12},    {"product", 4},   {"sector", 3},   {"stage", 4}};
  bool include_lead_age = true;
  std::vector<std::string> interaction_attributes{"lead_age", "owner", kQuarterOfYearAttr,
                                                  "stage"};
  CoefficientSpec coefficients;
  double target_positive_rate = 0.25;
  double seller_rating_noise = 0.2;
  double lost_fraction = 0.5;  // non-winners: P(lost) vs pending
  // Uniform creation-week window. Pinning both ends to one week yields one
  // snapshot per lead, the identifiable setting for coefficient recovery.
  int creation_week_min = 1;
  int creation_week_max = 13;

  void check() const;
  SchemaSpec schema() const;
};

// Everything the generator knows that the training path must never see.
struct LeadTruth {
  std::string lead_id;
  Quarter quarter;
  int creation_week = 1;
  OutcomeStatus status = OutcomeStatus::pending;
  // Week the win lands (one past the last snapshot week); empty unless won.
  std::optional<int> outcome_week;
  // Parallel by index, covering weeks creation_week..13 even past the win.
  std::vector<int> weeks;
  std::vector<double> hazard;    // per-week conversion probability
  std::vector<double> win_prob;  // P(won by quarter end | open at that week)
};

struct GroundTruth {
  FeatureVocabulary vocab;  // the generator's own vocabulary
  std::vector<double> weights;
  double intercept = 0.0;
  std::vector<LeadTruth> leads;

  const LeadTruth* find(const std::string& lead_id) const;
};

struct SimOutput {
  std::map<Quarter, SnapshotBatch> snapshots;
  std::map<Quarter, std::vector<OutcomeRecord>> outcomes;
  GroundTruth truth;
};

// Deterministic synthetic pipeline: static attributes per lead, weekly
// snapshots until outcome or quarter end, win timing from per-week logistic
// hazards, and the intercept calibrated to the target positive rate.
SimOutput generate(const GeneratorConfig& config);

// Scores every snapshot with its true win probability: the ranking ceiling
// any trained model is measured against.
std::vector<ScoredOutcome> bayes_optimal_scores(const GroundTruth& truth,
                                                const SnapshotBatch& snapshots,
                                                const std::string& segment_attribute = "geography");

inline constexpr int kGroundTruthFormatVersion = 1;

void write_ground_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth read_ground_truth(std::istream& in);

}  // namespace leadscore
