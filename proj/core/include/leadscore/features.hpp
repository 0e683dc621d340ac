#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leadscore/assembly.hpp"
#include "leadscore/snapshot.hpp"

namespace leadscore {

// Derived categorical attribute: the snapshot's quarter-of-year (Q1..Q4), so
// seasonal terms generalize across years. Recognized by fit and encode when
// listed in the interaction set; never read from the input schema.
inline constexpr const char* kQuarterOfYearAttr = "quarter_of_year";

// Bucket that absorbs categories below the frequency threshold and, at
// scoring time, categories never seen in training.
inline constexpr const char* kOtherCategory = "OTHER";

struct EncoderConfig {
  // Attributes whose terms are multiplied by the week number.
  std::vector<std::string> interaction_attributes{"lead_age", "owner", kQuarterOfYearAttr,
                                                  "stage"};
  // Categories seen fewer times than this collapse into OTHER.
  std::size_t min_category_count = 5;
  // Columns parsed from snapshots but kept out of the model (the seller's
  // subjective rating is a baseline, not a feature).
  std::vector<std::string> excluded_attributes{"seller_rating"};

  bool excluded(const std::string& attribute) const;
  void check() const;
};

struct StdStats {
  double mean = 0.0;
  double stddev = 1.0;

  bool operator==(const StdStats&) const = default;
};

// Frozen mapping from attribute terms to design-matrix columns. Column ids
// are assigned in four blocks -- unary categorical, continuous, interaction
// categorical, interaction continuous -- each ordered lexicographically, so
// identical inputs always produce identical maps.
struct FeatureVocabulary {
  std::map<std::pair<std::string, std::string>, std::size_t> unary;
  std::map<std::string, std::size_t> continuous;
  std::map<std::string, StdStats> standardization;  // keyed like `continuous`
  std::map<std::pair<std::string, std::string>, std::size_t> interaction_categorical;
  std::map<std::string, std::size_t> interaction_continuous;
  // Attributes the fitting data contained, including columns later dropped;
  // used for training-time schema checks.
  std::set<std::string> known_categorical;
  std::set<std::string> known_continuous;
  std::size_t total_columns = 0;
  std::uint64_t fingerprint = 0;

  bool operator==(const FeatureVocabulary&) const = default;

  // FNV-1a over the canonical rendering of every mapping and statistic.
  static std::uint64_t compute_fingerprint(const FeatureVocabulary& vocab);
};

// Assembles a vocabulary from known terms; fit_vocabulary and the synthetic
// generator both go through this so id assignment stays identical.
class VocabularyBuilder {
 public:
  void add_categorical(const std::string& attribute, std::vector<std::string> categories);
  void add_continuous(const std::string& attribute, StdStats stats);
  void note_known_categorical(const std::string& attribute);
  void note_known_continuous(const std::string& attribute);
  // Interaction terms mirror the attribute's unary categories; call after the
  // corresponding add_*.
  void interact_categorical(const std::string& attribute);
  void interact_continuous(const std::string& attribute);

  FeatureVocabulary finalize() const;

 private:
  std::map<std::string, std::vector<std::string>> categoricals_;
  std::map<std::string, StdStats> continuous_;
  std::set<std::string> interact_cat_;
  std::set<std::string> interact_cont_;
  std::set<std::string> known_cat_;
  std::set<std::string> known_cont_;
};

struct FitResult {
  FeatureVocabulary vocab;
  std::vector<std::string> warnings;
};

// Builds the frozen vocabulary from training rows: per-category counts with
// rare-category collapse, population mean/stddev for continuous columns
// (zero-variance columns dropped), and interaction terms per config.
FitResult fit_vocabulary(std::span<const LabeledRow> rows, const EncoderConfig& config);
FitResult fit_vocabulary(const TrainingSet& training, const EncoderConfig& config);

// Sparse encoded row: (column, value) pairs with strictly increasing column
// ids and no explicit zeros.
struct EncodedRow {
  std::vector<std::pair<std::size_t, double>> values;
  std::optional<int> label;

  double value_at(std::size_t column) const;
};

// Pure encoding of one snapshot at a given week. Unknown categories degrade
// to OTHER when present, otherwise the term is omitted; missing continuous
// values impute to the training mean (zero after standardization).
EncodedRow encode(const LeadSnapshot& snapshot, WeekIndex week, const FeatureVocabulary& vocab,
                  bool include_interactions = true);

struct DesignMatrix {
  std::vector<EncodedRow> rows;
  std::vector<int> labels;
};

// Encodes labeled rows in order, enforcing that every attribute present in
// the rows is known to the vocabulary.
DesignMatrix build_design_matrix(std::span<const LabeledRow> rows, const FeatureVocabulary& vocab,
                                 const EncoderConfig& config);

}  // namespace leadscore
