#include "leadscore/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "leadscore/errors.hpp"

namespace leadscore {

namespace {

std::optional<std::string> derived_quarter_of_year(const LeadSnapshot& snap) {
  if (!snap.quarter.valid()) return std::nullopt;
  return "Q" + std::to_string(snap.quarter.index);
}

// Category value for `attribute` on this snapshot, honoring the derived
// quarter-of-year pseudo attribute.
std::optional<std::string> categorical_value(const LeadSnapshot& snap,
                                             const std::string& attribute) {
  auto it = snap.categoricals.find(attribute);
  if (it != snap.categoricals.end()) return it->second;
  if (attribute == kQuarterOfYearAttr) return derived_quarter_of_year(snap);
  return std::nullopt;
}

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t fnv1a(std::uint64_t hash, const std::string& text) {
  return fnv1a(hash, text.data(), text.size());
}

std::uint64_t fnv1a(std::uint64_t hash, std::uint64_t value) {
  return fnv1a(hash, &value, sizeof(value));
}

std::uint64_t fnv1a(std::uint64_t hash, double value) {
  return fnv1a(hash, std::bit_cast<std::uint64_t>(value));
}

}  // namespace

bool EncoderConfig::excluded(const std::string& attribute) const {
  return std::count(excluded_attributes.begin(), excluded_attributes.end(), attribute) > 0;
}

void EncoderConfig::check() const {
  if (min_category_count < 1) throw ConfigError("min_category_count must be >= 1");
}

std::uint64_t FeatureVocabulary::compute_fingerprint(const FeatureVocabulary& vocab) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [key, col] : vocab.unary) {
    h = fnv1a(h, "U|" + key.first + "|" + key.second);
    h = fnv1a(h, static_cast<std::uint64_t>(col));
  }
  for (const auto& [attr, col] : vocab.continuous) {
    h = fnv1a(h, "C|" + attr);
    h = fnv1a(h, static_cast<std::uint64_t>(col));
    const auto& stats = vocab.standardization.at(attr);
    h = fnv1a(h, stats.mean);
    h = fnv1a(h, stats.stddev);
  }
  for (const auto& [key, col] : vocab.interaction_categorical) {
    h = fnv1a(h, "IC|" + key.first + "|" + key.second);
    h = fnv1a(h, static_cast<std::uint64_t>(col));
  }
  for (const auto& [attr, col] : vocab.interaction_continuous) {
    h = fnv1a(h, "IX|" + attr);
    h = fnv1a(h, static_cast<std::uint64_t>(col));
  }
  for (const auto& attr : vocab.known_categorical) h = fnv1a(h, "KC|" + attr);
  for (const auto& attr : vocab.known_continuous) h = fnv1a(h, "KN|" + attr);
  h = fnv1a(h, static_cast<std::uint64_t>(vocab.total_columns));
  return h;
}

void VocabularyBuilder::add_categorical(const std::string& attribute,
                                        std::vector<std::string> categories) {
  std::sort(categories.begin(), categories.end());
  categories.erase(std::unique(categories.begin(), categories.end()), categories.end());
  categoricals_[attribute] = std::move(categories);
  known_cat_.insert(attribute);
}

void VocabularyBuilder::add_continuous(const std::string& attribute, StdStats stats) {
  if (!(stats.stddev > 0)) throw ConfigError("stddev must be > 0 for column " + attribute);
  continuous_[attribute] = stats;
  known_cont_.insert(attribute);
}

void VocabularyBuilder::note_known_categorical(const std::string& attribute) {
  known_cat_.insert(attribute);
}

void VocabularyBuilder::note_known_continuous(const std::string& attribute) {
  known_cont_.insert(attribute);
}

void VocabularyBuilder::interact_categorical(const std::string& attribute) {
  if (!categoricals_.count(attribute)) {
    throw ConfigError("interaction attribute '" + attribute + "' has no unary categories");
  }
  interact_cat_.insert(attribute);
}

void VocabularyBuilder::interact_continuous(const std::string& attribute) {
  if (!continuous_.count(attribute)) {
    throw ConfigError("interaction attribute '" + attribute + "' is not a continuous column");
  }
  interact_cont_.insert(attribute);
}

FeatureVocabulary VocabularyBuilder::finalize() const {
  FeatureVocabulary vocab;
  std::size_t next = 0;
  for (const auto& [attr, cats] : categoricals_) {
    for (const auto& cat : cats) vocab.unary[{attr, cat}] = next++;
  }
  for (const auto& [attr, stats] : continuous_) {
    vocab.continuous[attr] = next++;
    vocab.standardization[attr] = stats;
  }
  for (const auto& attr : interact_cat_) {
    for (const auto& cat : categoricals_.at(attr)) {
      vocab.interaction_categorical[{attr, cat}] = next++;
    }
  }
  for (const auto& attr : interact_cont_) vocab.interaction_continuous[attr] = next++;
  vocab.known_categorical = known_cat_;
  vocab.known_continuous = known_cont_;
  vocab.total_columns = next;
  vocab.fingerprint = FeatureVocabulary::compute_fingerprint(vocab);
  return vocab;
}

FitResult fit_vocabulary(std::span<const LabeledRow> rows, const EncoderConfig& config) {
  config.check();
  if (rows.empty()) throw ConfigError("cannot fit a vocabulary on an empty training set");

  bool derive_quarter =
      std::count(config.interaction_attributes.begin(), config.interaction_attributes.end(),
                 kQuarterOfYearAttr) > 0;

  std::map<std::string, std::map<std::string, std::size_t>> category_counts;
  std::map<std::string, std::vector<double>> continuous_values;
  for (const auto& row : rows) {
    const auto& snap = row.snapshot;
    for (const auto& [attr, cat] : snap.categoricals) {
      if (config.excluded(attr)) continue;
      ++category_counts[attr][cat];
    }
    if (derive_quarter && !snap.categoricals.count(kQuarterOfYearAttr)) {
      if (auto q = derived_quarter_of_year(snap)) ++category_counts[kQuarterOfYearAttr][*q];
    }
    for (const auto& [attr, value] : snap.continuous) {
      if (config.excluded(attr)) continue;
      continuous_values[attr].push_back(value);
    }
  }

  FitResult result;
  VocabularyBuilder builder;

  for (const auto& [attr, counts] : category_counts) {
    std::vector<std::string> survivors;
    bool collapsed = false;
    for (const auto& [cat, count] : counts) {
      if (count >= config.min_category_count) {
        survivors.push_back(cat);
      } else {
        collapsed = true;
      }
    }
    if (survivors.empty()) {
      result.warnings.push_back("attribute '" + attr +
                                "' has no category above the frequency threshold; reduced to " +
                                kOtherCategory);
    }
    if (collapsed) survivors.push_back(kOtherCategory);
    builder.add_categorical(attr, std::move(survivors));
  }

  std::set<std::string> surviving_continuous;
  for (const auto& [attr, values] : continuous_values) {
    // Population moments over present values; missing values impute to the
    // mean at encode time.
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    double stddev = std::sqrt(var);
    if (stddev > 0) {
      builder.add_continuous(attr, {mean, stddev});
      surviving_continuous.insert(attr);
    } else {
      builder.note_known_continuous(attr);
      result.warnings.push_back("continuous column '" + attr + "' has zero variance; dropped");
    }
  }

  for (const auto& attr : config.interaction_attributes) {
    if (category_counts.count(attr)) {
      builder.interact_categorical(attr);
    } else if (surviving_continuous.count(attr)) {
      builder.interact_continuous(attr);
    } else if (!continuous_values.count(attr)) {
      result.warnings.push_back("interaction attribute '" + attr +
                                "' does not appear in the training data; skipped");
    }
  }

  result.vocab = builder.finalize();
  return result;
}

FitResult fit_vocabulary(const TrainingSet& training, const EncoderConfig& config) {
  return fit_vocabulary(std::span<const LabeledRow>(training.rows), config);
}

double EncodedRow::value_at(std::size_t column) const {
  for (const auto& [col, value] : values) {
    if (col == column) return value;
    if (col > column) break;
  }
  return 0.0;
}

EncodedRow encode(const LeadSnapshot& snapshot, WeekIndex week, const FeatureVocabulary& vocab,
                  bool include_interactions) {
  EncodedRow row;

  auto resolve_category = [&](const std::string& attr, const std::string& cat,
                              const auto& index) -> std::optional<std::size_t> {
    auto it = index.find(std::make_pair(attr, cat));
    if (it != index.end()) return it->second;
    auto other = index.find(std::make_pair(attr, std::string(kOtherCategory)));
    if (other != index.end()) return other->second;
    return std::nullopt;
  };

  // Unary block: ascending ids because both maps share the same ordering.
  std::set<std::string> unary_attrs;
  for (const auto& [key, _] : vocab.unary) unary_attrs.insert(key.first);
  for (const auto& attr : unary_attrs) {
    auto value = categorical_value(snapshot, attr);
    if (!value) continue;
    if (auto col = resolve_category(attr, *value, vocab.unary)) {
      row.values.emplace_back(*col, 1.0);
    }
  }

  for (const auto& [attr, col] : vocab.continuous) {
    const auto& stats = vocab.standardization.at(attr);
    auto it = snapshot.continuous.find(attr);
    double x = it == snapshot.continuous.end() ? stats.mean : it->second;
    double standardized = (x - stats.mean) / stats.stddev;
    if (standardized != 0.0) row.values.emplace_back(col, standardized);
  }

  if (include_interactions) {
    double w = static_cast<double>(week.value);
    std::set<std::string> inter_attrs;
    for (const auto& [key, _] : vocab.interaction_categorical) inter_attrs.insert(key.first);
    for (const auto& attr : inter_attrs) {
      auto value = categorical_value(snapshot, attr);
      if (!value) continue;
      if (auto col = resolve_category(attr, *value, vocab.interaction_categorical)) {
        row.values.emplace_back(*col, w);
      }
    }
    for (const auto& [attr, col] : vocab.interaction_continuous) {
      const auto& stats = vocab.standardization.at(attr);
      auto it = snapshot.continuous.find(attr);
      double x = it == snapshot.continuous.end() ? stats.mean : it->second;
      double standardized = (x - stats.mean) / stats.stddev;
      if (standardized != 0.0) row.values.emplace_back(col, w * standardized);
    }
  }

  // Blocks are emitted in id order already; values within a block likewise.
  return row;
}

DesignMatrix build_design_matrix(std::span<const LabeledRow> rows, const FeatureVocabulary& vocab,
                                 const EncoderConfig& config) {
  DesignMatrix matrix;
  matrix.rows.reserve(rows.size());
  matrix.labels.reserve(rows.size());
  for (const auto& row : rows) {
    for (const auto& [attr, _] : row.snapshot.categoricals) {
      if (config.excluded(attr)) continue;
      if (!vocab.known_categorical.count(attr)) {
        throw SchemaError("attribute '" + attr + "' is not in the fitted vocabulary");
      }
    }
    for (const auto& [attr, _] : row.snapshot.continuous) {
      if (config.excluded(attr)) continue;
      if (!vocab.known_continuous.count(attr)) {
        throw SchemaError("attribute '" + attr + "' is not in the fitted vocabulary");
      }
    }
    EncodedRow encoded = encode(row.snapshot, row.snapshot.week, vocab, true);
    encoded.label = row.label;
    matrix.rows.push_back(std::move(encoded));
    matrix.labels.push_back(row.label);
  }
  return matrix;
}

}  // namespace leadscore
