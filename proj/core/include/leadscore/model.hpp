#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "leadscore/features.hpp"
#include "leadscore/quarter.hpp"

namespace leadscore {

struct TrainConfig {
  // L2 strength on weights (never the intercept). Unset means 1/n, which
  // matches a unit penalty on the unaveraged log-likelihood.
  std::optional<double> l2;
  int max_iterations = 500;
  double tolerance = 1e-8;  // relative loss decrease between iterations
  // Backtracking line search.
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;

  void check() const;
};

struct TrainReport {
  std::vector<double> loss_trajectory;  // index 0 is the zero-weight loss
  int iterations = 0;
  bool converged = false;
  double l2 = 0.0;  // resolved value actually used
  // In-memory only; never serialized, so artifacts stay byte-reproducible.
  double wall_time_ms = 0.0;
};

struct TrainMeta {
  std::vector<Quarter> source_quarters;
  std::optional<Quarter> target_quarter;
  double l2 = 0.0;
  int iterations = 0;
  double final_loss = 0.0;
  bool converged = false;
};

struct LogisticModel {
  std::vector<double> weights;  // length == vocab.total_columns
  double intercept = 0.0;
  FeatureVocabulary vocab;
  TrainMeta meta;
};

double sigmoid(double logit);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_intercept = 0.0;
};

// Mean negative log-likelihood plus (l2/2)*||w||^2, with the log-sum-exp
// formulation so logits up to +-1e3 and beyond stay finite.
LossGrad loss_and_gradient(std::span<const double> weights, double intercept,
                           std::span<const EncodedRow> matrix, std::span<const int> labels,
                           double l2);

struct OptimResult {
  std::vector<double> weights;
  double intercept = 0.0;
  TrainReport report;
};

// Deterministic full-batch gradient descent with Armijo backtracking. The
// default start is the zero vector; an explicit init is accepted so convexity
// checks can perturb it.
OptimResult minimize_logistic(std::span<const EncodedRow> matrix, std::span<const int> labels,
                              std::size_t dimension, const TrainConfig& config,
                              std::span<const double> init_weights = {},
                              double init_intercept = 0.0);

// Trains against a frozen vocabulary and stamps the resolved hyperparameters
// into the model metadata.
std::pair<LogisticModel, TrainReport> train(std::span<const EncodedRow> matrix,
                                            std::span<const int> labels,
                                            const FeatureVocabulary& vocab,
                                            const TrainConfig& config, TrainMeta meta = {});

double predict_logit(const LogisticModel& model, const EncodedRow& row);
double predict_propensity(const LogisticModel& model, const EncodedRow& row);

// Versioned UTF-8 model document. load(save(m)) reproduces every field
// bit-exactly, including weights.
inline constexpr int kModelFormatVersion = 1;

void save_model(std::ostream& out, const LogisticModel& model);

struct LoadResult {
  LogisticModel model;
  // False when the stored vocabulary fingerprint does not match the
  // recomputed one; surfaced as a warning, not an error.
  bool fingerprint_ok = true;
};

LoadResult load_model(std::istream& in);

}  // namespace leadscore
