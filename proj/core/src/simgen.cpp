#include "leadscore/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "json_io.hpp"
#include "leadscore/csv.hpp"
#include "leadscore/errors.hpp"
#include "leadscore/model.hpp"
#include "leadscore/rng.hpp"

namespace leadscore {

namespace {

constexpr double kLeadAgeMean = 182.5;
const double kLeadAgeStd = 365.0 / std::sqrt(12.0);

// Stream purposes, so draws for one concern never shift another.
constexpr std::uint64_t kStaticsStream = 1;
constexpr std::uint64_t kOutcomeStream = 2;
constexpr std::uint64_t kSellerStream = 3;
constexpr std::uint64_t kCoefficientStream = 4;

std::uint64_t quarter_code(Quarter q) {
  return static_cast<std::uint64_t>(q.year) * 4 + static_cast<std::uint64_t>(q.index);
}

std::string category_name(const std::string& attribute, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%03d", index);
  return attribute + buf;
}

std::string lead_name(Quarter q, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "-%06d", index);
  return "L" + q.str() + buf;
}

FeatureVocabulary build_generator_vocab(const GeneratorConfig& config) {
  VocabularyBuilder builder;
  for (const auto& [attr, cardinality] : config.categorical_cardinalities) {
    std::vector<std::string> categories;
    categories.reserve(cardinality);
    for (int i = 0; i < cardinality; ++i) categories.push_back(category_name(attr, i));
    builder.add_categorical(attr, std::move(categories));
  }
  bool quarter_term =
      std::count(config.interaction_attributes.begin(), config.interaction_attributes.end(),
                 kQuarterOfYearAttr) > 0;
  if (quarter_term) builder.add_categorical(kQuarterOfYearAttr, {"Q1", "Q2", "Q3", "Q4"});
  if (config.include_lead_age) builder.add_continuous("lead_age", {kLeadAgeMean, kLeadAgeStd});
  for (const auto& attr : config.interaction_attributes) {
    if (config.categorical_cardinalities.count(attr) || attr == kQuarterOfYearAttr) {
      builder.interact_categorical(attr);
    } else if (attr == "lead_age" && config.include_lead_age) {
      builder.interact_continuous(attr);
    } else {
      throw ConfigError("interaction attribute '" + attr + "' is not generated");
    }
  }
  return builder.finalize();
}

std::vector<double> resolve_coefficients(const GeneratorConfig& config,
                                         const FeatureVocabulary& vocab) {
  std::vector<double> weights(vocab.total_columns, 0.0);
  const CoefficientSpec& spec = config.coefficients;
  if (spec.explicit_coefficients) {
    for (const auto& [key, coef] : spec.unary) weights.at(vocab.unary.at(key)) = coef;
    for (const auto& [attr, coef] : spec.continuous) weights.at(vocab.continuous.at(attr)) = coef;
    for (const auto& [key, coef] : spec.interaction_categorical) {
      weights.at(vocab.interaction_categorical.at(key)) = coef;
    }
    for (const auto& [attr, coef] : spec.interaction_continuous) {
      weights.at(vocab.interaction_continuous.at(attr)) = coef;
    }
    return weights;
  }
  SplitMix64 rng(mix_streams(config.seed, kCoefficientStream));
  for (const auto& [key, col] : vocab.unary) {
    weights[col] = spec.coefficient_scale * rng.next_normal();
  }
  for (const auto& [attr, col] : vocab.continuous) {
    weights[col] = spec.coefficient_scale * rng.next_normal();
  }
  // Interaction terms are multiplied by week numbers up to 13; keep their
  // scale an order of magnitude smaller so hazards stay informative.
  for (const auto& [key, col] : vocab.interaction_categorical) {
    weights[col] = 0.1 * spec.coefficient_scale * rng.next_normal();
  }
  for (const auto& [attr, col] : vocab.interaction_continuous) {
    weights[col] = 0.1 * spec.coefficient_scale * rng.next_normal();
  }
  return weights;
}

struct LeadDraft {
  std::string lead_id;
  Quarter quarter;
  int index = 0;
  int creation_week = 1;
  double base_age = 0.0;
  std::map<std::string, std::string> categoricals;
  std::vector<double> logits;  // per week creation..13, without the intercept
};

LeadSnapshot draft_snapshot(const LeadDraft& draft, int week, bool include_age) {
  LeadSnapshot snap;
  snap.lead_id = draft.lead_id;
  snap.quarter = draft.quarter;
  snap.week = WeekIndex{week};
  snap.categoricals = draft.categoricals;
  if (include_age) {
    snap.continuous["lead_age"] = draft.base_age + 7.0 * (week - draft.creation_week);
  }
  return snap;
}

double dot_row(const std::vector<double>& weights, const EncodedRow& row) {
  double z = 0.0;
  for (const auto& [col, value] : row.values) z += weights[col] * value;
  return z;
}

}  // namespace

void GeneratorConfig::check() const {
  if (leads_per_quarter < 1) throw ConfigError("leads_per_quarter must be >= 1");
  if (quarters.empty()) throw ConfigError("at least one quarter is required");
  for (const auto& q : quarters) {
    if (!q.valid()) throw ConfigError("invalid quarter in generator config");
  }
  for (const auto& [attr, card] : categorical_cardinalities) {
    if (card < 1) throw ConfigError("cardinality for '" + attr + "' must be >= 1");
  }
  if (!(target_positive_rate > 0 && target_positive_rate < 1)) {
    throw ConfigError("target_positive_rate must be in (0,1)");
  }
  if (seller_rating_noise < 0) throw ConfigError("seller_rating_noise must be >= 0");
  if (lost_fraction < 0 || lost_fraction > 1) throw ConfigError("lost_fraction must be in [0,1]");
  if (creation_week_min < 1 || creation_week_max > kWeeksPerQuarter ||
      creation_week_min > creation_week_max) {
    throw ConfigError("creation week window must satisfy 1 <= min <= max <= 13");
  }
}

SchemaSpec GeneratorConfig::schema() const {
  SchemaSpec spec;
  for (const auto& [attr, _] : categorical_cardinalities) spec.categorical_columns.push_back(attr);
  if (include_lead_age) spec.continuous_columns.push_back("lead_age");
  spec.continuous_columns.push_back("seller_rating");
  return spec;
}

const LeadTruth* GroundTruth::find(const std::string& lead_id) const {
  for (const auto& lead : leads) {
    if (lead.lead_id == lead_id) return &lead;
  }
  return nullptr;
}

SimOutput generate(const GeneratorConfig& config) {
  config.check();
  FeatureVocabulary vocab = build_generator_vocab(config);
  std::vector<double> weights = resolve_coefficients(config, vocab);
  bool interactions = !config.interaction_attributes.empty();

  // Pass 1: static attributes and per-week logits for every lead.
  std::vector<LeadDraft> drafts;
  drafts.reserve(static_cast<std::size_t>(config.leads_per_quarter) * config.quarters.size());
  std::vector<Quarter> quarters = config.quarters;
  std::sort(quarters.begin(), quarters.end());
  quarters.erase(std::unique(quarters.begin(), quarters.end()), quarters.end());

  for (const auto& quarter : quarters) {
    for (int i = 0; i < config.leads_per_quarter; ++i) {
      SplitMix64 rng(mix_streams(config.seed, quarter_code(quarter), i, kStaticsStream));
      LeadDraft draft;
      draft.lead_id = lead_name(quarter, i);
      draft.quarter = quarter;
      draft.index = i;
      for (const auto& [attr, cardinality] : config.categorical_cardinalities) {
        draft.categoricals[attr] =
            category_name(attr, static_cast<int>(rng.next_below(cardinality)));
      }
      int window = config.creation_week_max - config.creation_week_min + 1;
      draft.creation_week =
          config.creation_week_min + static_cast<int>(rng.next_below(window));
      draft.base_age = 365.0 * rng.next_unit();
      for (int week = draft.creation_week; week <= kWeeksPerQuarter; ++week) {
        LeadSnapshot snap = draft_snapshot(draft, week, config.include_lead_age);
        draft.logits.push_back(dot_row(weights, encode(snap, WeekIndex{week}, vocab, interactions)));
      }
      drafts.push_back(std::move(draft));
    }
  }

  // Calibrate the intercept so the expected win rate hits the target.
  auto expected_rate = [&](double intercept) {
    double total = 0.0;
    for (const auto& draft : drafts) {
      double survive = 1.0;
      for (double z : draft.logits) survive *= 1.0 - sigmoid(z + intercept);
      total += 1.0 - survive;
    }
    return total / static_cast<double>(drafts.size());
  };
  double lo = -30.0, hi = 30.0;
  for (int iter = 0; iter < 80; ++iter) {
    double mid = (lo + hi) / 2.0;
    if (expected_rate(mid) < config.target_positive_rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double intercept = (lo + hi) / 2.0;
  double achieved = expected_rate(intercept);
  if (std::abs(achieved - config.target_positive_rate) > 0.049) {
    throw ConfigError("positive-rate target " + format_double(config.target_positive_rate) +
                      " unreachable; calibration achieved " + format_double(achieved));
  }

  // Pass 2: outcomes, snapshots and the truth record.
  SimOutput out;
  out.truth.vocab = vocab;
  out.truth.weights = weights;
  out.truth.intercept = intercept;
  out.truth.leads.reserve(drafts.size());

  for (const auto& draft : drafts) {
    LeadTruth truth;
    truth.lead_id = draft.lead_id;
    truth.quarter = draft.quarter;
    truth.creation_week = draft.creation_week;

    int weeks_open = kWeeksPerQuarter - draft.creation_week + 1;
    truth.weeks.resize(weeks_open);
    truth.hazard.resize(weeks_open);
    truth.win_prob.resize(weeks_open);
    for (int k = 0; k < weeks_open; ++k) {
      truth.weeks[k] = draft.creation_week + k;
      truth.hazard[k] = sigmoid(draft.logits[k] + intercept);
    }
    double survive = 1.0;
    for (int k = weeks_open - 1; k >= 0; --k) {
      survive *= 1.0 - truth.hazard[k];
      truth.win_prob[k] = 1.0 - survive;
    }

    SplitMix64 outcome_rng(mix_streams(config.seed, quarter_code(draft.quarter),
                                       static_cast<std::uint64_t>(draft.index), kOutcomeStream));
    int won_at = 0;  // snapshot week the lead converts in; 0 = never
    for (int k = 0; k < weeks_open; ++k) {
      if (outcome_rng.next_unit() < truth.hazard[k]) {
        won_at = truth.weeks[k];
        break;
      }
    }
    if (won_at > 0) {
      truth.status = OutcomeStatus::won;
      truth.outcome_week = won_at + 1;
    } else {
      truth.status = outcome_rng.next_unit() < config.lost_fraction ? OutcomeStatus::lost
                                                                    : OutcomeStatus::pending;
    }

    int last_snapshot_week = won_at > 0 ? won_at : kWeeksPerQuarter;
    SplitMix64 seller_rng(mix_streams(config.seed, quarter_code(draft.quarter),
                                      static_cast<std::uint64_t>(draft.index), kSellerStream));
    auto& batch = out.snapshots[draft.quarter];
    for (int week = draft.creation_week; week <= last_snapshot_week; ++week) {
      LeadSnapshot snap = draft_snapshot(draft, week, config.include_lead_age);
      double rating = truth.win_prob[week - draft.creation_week];
      if (config.seller_rating_noise > 0) {
        rating += config.seller_rating_noise * seller_rng.next_normal();
      }
      snap.continuous["seller_rating"] = std::clamp(rating, 0.0, 1.0);
      batch.push_back(std::move(snap));
    }
    out.outcomes[draft.quarter].push_back({draft.lead_id, draft.quarter, truth.status, {}});
    out.truth.leads.push_back(std::move(truth));
  }
  return out;
}

std::vector<ScoredOutcome> bayes_optimal_scores(const GroundTruth& truth,
                                                const SnapshotBatch& snapshots,
                                                const std::string& segment_attribute) {
  std::unordered_map<std::string, const LeadTruth*> by_lead;
  by_lead.reserve(truth.leads.size());
  for (const auto& lead : truth.leads) by_lead.emplace(lead.lead_id, &lead);

  std::vector<ScoredOutcome> scored;
  scored.reserve(snapshots.size());
  for (const auto& snap : snapshots) {
    auto it = by_lead.find(snap.lead_id);
    if (it == by_lead.end()) {
      throw DomainError("snapshot lead " + snap.lead_id + " not found in ground truth");
    }
    const LeadTruth& lead = *it->second;
    int k = snap.week.value - lead.creation_week;
    if (k < 0 || k >= static_cast<int>(lead.win_prob.size())) {
      throw DomainError("week " + std::to_string(snap.week.value) +
                        " not covered by ground truth for lead " + snap.lead_id);
    }
    ScoredOutcome s;
    s.lead_id = snap.lead_id;
    s.score = lead.win_prob[k];
    s.label = lead.status == OutcomeStatus::won ? 1 : 0;
    s.week = snap.week;
    auto seg = snap.categoricals.find(segment_attribute);
    s.segment = seg == snap.categoricals.end() ? std::string() : seg->second;
    scored.push_back(std::move(s));
  }
  return scored;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  nlohmann::json j;
  j["format_version"] = kGroundTruthFormatVersion;
  j["vocabulary"] = detail::vocab_to_json(truth.vocab);
  j["weights"] = truth.weights;
  j["intercept"] = truth.intercept;
  auto& leads = j["leads"] = nlohmann::json::array();
  for (const auto& lead : truth.leads) {
    nlohmann::json entry;
    entry["lead_id"] = lead.lead_id;
    entry["quarter"] = lead.quarter.str();
    entry["creation_week"] = lead.creation_week;
    entry["status"] = std::string(to_string(lead.status));
    entry["outcome_week"] =
        lead.outcome_week ? nlohmann::json(*lead.outcome_week) : nlohmann::json();
    entry["weeks"] = lead.weeks;
    entry["hazard"] = lead.hazard;
    entry["win_prob"] = lead.win_prob;
    leads.push_back(std::move(entry));
  }
  out << j.dump() << '\n';
}

GroundTruth read_ground_truth(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ground truth file is not valid JSON: ") + e.what());
  }
  try {
    int version = j.at("format_version").get<int>();
    if (version != kGroundTruthFormatVersion) {
      throw VersionError("unsupported ground truth format_version " + std::to_string(version));
    }
    GroundTruth truth;
    truth.vocab = detail::vocab_from_json(j.at("vocabulary"));
    truth.weights = j.at("weights").get<std::vector<double>>();
    truth.intercept = j.at("intercept").get<double>();
    for (const auto& entry : j.at("leads")) {
      LeadTruth lead;
      lead.lead_id = entry.at("lead_id").get<std::string>();
      lead.quarter = Quarter::parse(entry.at("quarter").get<std::string>());
      lead.creation_week = entry.at("creation_week").get<int>();
      lead.status = parse_status(entry.at("status").get<std::string>());
      if (!entry.at("outcome_week").is_null()) lead.outcome_week = entry.at("outcome_week").get<int>();
      lead.weeks = entry.at("weeks").get<std::vector<int>>();
      lead.hazard = entry.at("hazard").get<std::vector<double>>();
      lead.win_prob = entry.at("win_prob").get<std::vector<double>>();
      truth.leads.push_back(std::move(lead));
    }
    return truth;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed ground truth file: ") + e.what());
  }
}

}  // namespace leadscore
