#include "leadscore/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>

#include "json_io.hpp"
#include "leadscore/errors.hpp"

namespace leadscore {

namespace {

double softplus(double z) {
  // log(1 + e^z) without overflow on either side.
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double dot(std::span<const double> weights, const EncodedRow& row) {
  double z = 0.0;
  for (const auto& [col, value] : row.values) {
    if (col >= weights.size()) {
      throw DomainError("column id " + std::to_string(col) + " out of range (dimension " +
                        std::to_string(weights.size()) + ")");
    }
    z += weights[col] * value;
  }
  return z;
}

void check_labels(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw DomainError("labels must be 0 or 1, got " + std::to_string(y));
  }
}

}  // namespace

void TrainConfig::check() const {
  if (l2 && *l2 < 0) throw ConfigError("l2 must be >= 0");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(tolerance > 0)) throw ConfigError("tolerance must be > 0");
  if (!(initial_step > 0)) throw ConfigError("initial_step must be > 0");
  if (!(shrink > 0 && shrink < 1)) throw ConfigError("shrink must be in (0,1)");
  if (!(sufficient_decrease > 0)) throw ConfigError("sufficient_decrease must be > 0");
}

double sigmoid(double logit) {
  if (logit >= 0) return 1.0 / (1.0 + std::exp(-logit));
  double e = std::exp(logit);
  return e / (1.0 + e);
}

LossGrad loss_and_gradient(std::span<const double> weights, double intercept,
                           std::span<const EncodedRow> matrix, std::span<const int> labels,
                           double l2) {
  if (matrix.empty()) throw DomainError("loss requires a non-empty matrix");
  if (matrix.size() != labels.size()) throw DomainError("matrix/labels size mismatch");
  check_labels(labels);

  LossGrad out;
  out.grad_weights.assign(weights.size(), 0.0);
  double loss = 0.0;
  double grad_b = 0.0;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const EncodedRow& row = matrix[i];
    double y = labels[i];
    double z = intercept + dot(weights, row);
    loss += softplus(z) - y * z;
    double residual = sigmoid(z) - y;
    grad_b += residual;
    for (const auto& [col, value] : row.values) out.grad_weights[col] += residual * value;
  }
  double n = static_cast<double>(matrix.size());
  loss /= n;
  grad_b /= n;
  double penalty = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    out.grad_weights[j] = out.grad_weights[j] / n + l2 * weights[j];
    penalty += weights[j] * weights[j];
  }
  out.loss = loss + 0.5 * l2 * penalty;
  out.grad_intercept = grad_b;
  return out;
}

OptimResult minimize_logistic(std::span<const EncodedRow> matrix, std::span<const int> labels,
                              std::size_t dimension, const TrainConfig& config,
                              std::span<const double> init_weights, double init_intercept) {
  config.check();
  if (!init_weights.empty() && init_weights.size() != dimension) {
    throw ConfigError("init_weights length does not match dimension");
  }
  double l2 = config.l2 ? *config.l2 : 1.0 / static_cast<double>(matrix.size());

  OptimResult result;
  result.weights.assign(dimension, 0.0);
  if (!init_weights.empty()) {
    std::copy(init_weights.begin(), init_weights.end(), result.weights.begin());
  }
  result.intercept = init_intercept;
  result.report.l2 = l2;

  LossGrad current = loss_and_gradient(result.weights, result.intercept, matrix, labels, l2);
  if (!std::isfinite(current.loss)) throw NumericalError("non-finite loss", 0);
  result.report.loss_trajectory.push_back(current.loss);

  std::vector<double> candidate(dimension);
  double step = config.initial_step;
  // Previous iterate and gradient, for the Barzilai-Borwein trial step.
  std::vector<double> prev_weights;
  std::vector<double> prev_grad;
  double prev_intercept = 0.0;
  double prev_grad_b = 0.0;
  constexpr int kMaxBacktracks = 100;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    double grad_sq = current.grad_intercept * current.grad_intercept;
    for (double g : current.grad_weights) grad_sq += g * g;
    if (grad_sq == 0.0) {
      result.report.converged = true;
      break;
    }

    // Trial step: Barzilai-Borwein when the curvature estimate is usable,
    // otherwise twice the last accepted step. Armijo backtracking below makes
    // either choice safe.
    double t = std::min(step * 2.0, 1e8);
    if (!prev_weights.empty()) {
      double sy = (result.intercept - prev_intercept) * (current.grad_intercept - prev_grad_b);
      double ss = (result.intercept - prev_intercept) * (result.intercept - prev_intercept);
      for (std::size_t j = 0; j < dimension; ++j) {
        double s = result.weights[j] - prev_weights[j];
        double y = current.grad_weights[j] - prev_grad[j];
        sy += s * y;
        ss += s * s;
      }
      if (sy > 0 && ss > 0) t = std::min(ss / sy, 1e8);
    }
    prev_weights = result.weights;
    prev_grad = current.grad_weights;
    prev_intercept = result.intercept;
    prev_grad_b = current.grad_intercept;
    bool accepted = false;
    LossGrad next;
    double candidate_b = 0.0;
    for (int attempt = 0; attempt < kMaxBacktracks; ++attempt) {
      for (std::size_t j = 0; j < dimension; ++j) {
        candidate[j] = result.weights[j] - t * current.grad_weights[j];
      }
      candidate_b = result.intercept - t * current.grad_intercept;
      next = loss_and_gradient(candidate, candidate_b, matrix, labels, l2);
      if (next.loss <= current.loss - config.sufficient_decrease * t * grad_sq) {
        accepted = true;
        break;
      }
      t *= config.shrink;
    }
    if (!accepted) {
      // No representable step decreases the loss: numerical optimum.
      result.report.converged = true;
      break;
    }
    if (!std::isfinite(next.loss)) throw NumericalError("non-finite loss", iter);

    double decrease = current.loss - next.loss;
    result.weights.swap(candidate);
    result.intercept = candidate_b;
    current = std::move(next);
    step = t;
    result.report.loss_trajectory.push_back(current.loss);
    result.report.iterations = iter;

    double relative = decrease / std::max(std::abs(current.loss), 1e-300);
    if (relative < config.tolerance) {
      result.report.converged = true;
      break;
    }
  }
  return result;
}

std::pair<LogisticModel, TrainReport> train(std::span<const EncodedRow> matrix,
                                            std::span<const int> labels,
                                            const FeatureVocabulary& vocab,
                                            const TrainConfig& config, TrainMeta meta) {
  if (matrix.empty()) throw DomainError("training requires a non-empty matrix");
  check_labels(labels);
  auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    throw DegenerateLabelsError("training labels are a single class");
  }

  auto started = std::chrono::steady_clock::now();
  OptimResult optim = minimize_logistic(matrix, labels, vocab.total_columns, config);
  optim.report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();

  LogisticModel model;
  model.weights = std::move(optim.weights);
  model.intercept = optim.intercept;
  model.vocab = vocab;
  meta.l2 = optim.report.l2;
  meta.iterations = optim.report.iterations;
  meta.final_loss = optim.report.loss_trajectory.back();
  meta.converged = optim.report.converged;
  model.meta = std::move(meta);
  return {std::move(model), std::move(optim.report)};
}

double predict_logit(const LogisticModel& model, const EncodedRow& row) {
  for (const auto& [col, _] : row.values) {
    if (col >= model.vocab.total_columns) {
      throw DomainError("column id " + std::to_string(col) + " out of range for this model");
    }
  }
  return model.intercept + dot(model.weights, row);
}

double predict_propensity(const LogisticModel& model, const EncodedRow& row) {
  return sigmoid(predict_logit(model, row));
}

void save_model(std::ostream& out, const LogisticModel& model) {
  if (model.weights.size() != model.vocab.total_columns) {
    throw DomainError("model weight length does not match the vocabulary");
  }
  if (!std::isfinite(model.intercept) ||
      !std::all_of(model.weights.begin(), model.weights.end(),
                   [](double w) { return std::isfinite(w); })) {
    throw DomainError("model contains non-finite parameters");
  }

  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["vocabulary"] = detail::vocab_to_json(model.vocab);
  j["weights"] = model.weights;
  j["intercept"] = model.intercept;
  nlohmann::json meta;
  auto& sources = meta["source_quarters"] = nlohmann::json::array();
  for (const auto& q : model.meta.source_quarters) sources.push_back(q.str());
  meta["target_quarter"] =
      model.meta.target_quarter ? nlohmann::json(model.meta.target_quarter->str())
                                : nlohmann::json();
  meta["l2"] = model.meta.l2;
  meta["iterations"] = model.meta.iterations;
  meta["final_loss"] = model.meta.final_loss;
  meta["converged"] = model.meta.converged;
  j["train_meta"] = std::move(meta);
  out << j.dump(2) << '\n';
}

LoadResult load_model(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw VersionError("unsupported model format_version " + std::to_string(version));
    }
    LoadResult result;
    LogisticModel& model = result.model;
    model.vocab = detail::vocab_from_json(j.at("vocabulary"));
    model.weights = j.at("weights").get<std::vector<double>>();
    model.intercept = j.at("intercept").get<double>();
    const auto& meta = j.at("train_meta");
    for (const auto& q : meta.at("source_quarters")) {
      model.meta.source_quarters.push_back(Quarter::parse(q.get<std::string>()));
    }
    if (!meta.at("target_quarter").is_null()) {
      model.meta.target_quarter = Quarter::parse(meta.at("target_quarter").get<std::string>());
    }
    model.meta.l2 = meta.at("l2").get<double>();
    model.meta.iterations = meta.at("iterations").get<int>();
    model.meta.final_loss = meta.at("final_loss").get<double>();
    model.meta.converged = meta.at("converged").get<bool>();

    if (model.weights.size() != model.vocab.total_columns) {
      throw ParseError("weight length does not match the stored vocabulary");
    }
    result.fingerprint_ok =
        FeatureVocabulary::compute_fingerprint(model.vocab) == model.vocab.fingerprint;
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace leadscore
