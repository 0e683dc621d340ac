// leadscore: command-line front end for the win-propensity pipeline.
// Subcommands follow the pipeline protocol end to end:
//   simulate -> assemble -> train -> score -> evaluate
// Exit codes: 0 success, 1 data/runtime error, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "leadscore/assembly.hpp"
#include "leadscore/csv.hpp"
#include "leadscore/errors.hpp"
#include "leadscore/features.hpp"
#include "leadscore/metrics.hpp"
#include "leadscore/model.hpp"
#include "leadscore/quarter.hpp"
#include "leadscore/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "leadscore 1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Warnings never abort by default; --strict promotes them to errors.
class WarningSink {
 public:
  explicit WarningSink(bool strict) : strict_(strict) {}

  void warn(const std::string& message) {
    if (strict_) throw leadscore::Error("warning promoted by --strict: " + message);
    std::cerr << "warning: " << message << '\n';
  }

 private:
  bool strict_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<leadscore::Quarter> parse_quarter_list(const std::string& text) {
  std::vector<leadscore::Quarter> out;
  for (const auto& item : split_list(text)) {
    try {
      out.push_back(leadscore::Quarter::parse(item));
    } catch (const leadscore::ParseError& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw leadscore::Error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw leadscore::Error("cannot write " + path.string());
  return out;
}

// Column routing from the file header: everything that is not a core column
// is categorical unless listed as continuous.
leadscore::SchemaSpec infer_schema(const fs::path& snapshot_file,
                                   const std::vector<std::string>& continuous_hint) {
  auto in = open_input(snapshot_file);
  std::string header;
  if (!std::getline(in, header)) {
    throw leadscore::SchemaError(snapshot_file.string() + " has no header row");
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  leadscore::SchemaSpec schema;
  std::istringstream fields(header);
  std::string name;
  while (std::getline(fields, name, ',')) {
    if (name == "lead_id" || name == "quarter" || name == "week" || name == "label") continue;
    if (std::count(continuous_hint.begin(), continuous_hint.end(), name)) {
      schema.continuous_columns.push_back(name);
    } else {
      schema.categorical_columns.push_back(name);
    }
  }
  return schema;
}

void write_manifest(const fs::path& path, const std::string& command, json flags,
                    std::vector<std::string> inputs, std::vector<std::string> outputs) {
  json manifest;
  manifest["command"] = command;
  manifest["tool_version"] = kToolVersion;
  manifest["flags"] = std::move(flags);
  manifest["inputs"] = std::move(inputs);
  manifest["outputs"] = std::move(outputs);
  auto out = open_output(path);
  out << manifest.dump(2) << '\n';
}

fs::path snapshot_file(const fs::path& dir, leadscore::Quarter q) {
  return dir / ("snapshots_" + q.str() + ".csv");
}

fs::path outcome_file(const fs::path& dir, leadscore::Quarter q) {
  return dir / ("outcomes_" + q.str() + ".csv");
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::uint64_t seed = 42;
  int leads = 1000;
  std::string quarters;
  std::string out_dir;
  double positive_rate = 0.25;
  double seller_noise = 0.2;
  double lost_fraction = 0.5;
  int creation_week_min = 1;
  int creation_week_max = 13;
  std::string interactions = "lead_age,owner,quarter_of_year,stage";
  double coefficient_scale = 0.8;
};

int run_simulate(const SimulateOpts& opts) {
  leadscore::GeneratorConfig config;
  config.seed = opts.seed;
  config.leads_per_quarter = opts.leads;
  config.quarters = parse_quarter_list(opts.quarters);
  if (config.quarters.empty()) throw UsageError("--quarters must name at least one quarter");
  config.target_positive_rate = opts.positive_rate;
  config.seller_rating_noise = opts.seller_noise;
  config.lost_fraction = opts.lost_fraction;
  config.creation_week_min = opts.creation_week_min;
  config.creation_week_max = opts.creation_week_max;
  config.interaction_attributes = split_list(opts.interactions);
  config.coefficients.coefficient_scale = opts.coefficient_scale;
  try {
    config.check();
  } catch (const leadscore::ConfigError& e) {
    throw UsageError(e.what());
  }

  leadscore::SimOutput sim = leadscore::generate(config);
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  leadscore::SchemaSpec schema = config.schema();

  std::vector<std::string> outputs;
  for (const auto& [quarter, batch] : sim.snapshots) {
    auto out = open_output(snapshot_file(dir, quarter));
    leadscore::write_snapshot_csv(out, batch, schema);
    outputs.push_back(snapshot_file(dir, quarter).string());
  }
  for (const auto& [quarter, records] : sim.outcomes) {
    auto out = open_output(outcome_file(dir, quarter));
    leadscore::write_outcome_csv(out, records);
    outputs.push_back(outcome_file(dir, quarter).string());
  }
  {
    // Ground truth never feeds the training path; it exists for evaluation
    // oracles only.
    auto out = open_output(dir / "ground_truth.json");
    leadscore::write_ground_truth(out, sim.truth);
    outputs.push_back((dir / "ground_truth.json").string());
  }

  json flags{{"seed", opts.seed},
             {"leads", opts.leads},
             {"quarters", opts.quarters},
             {"positive_rate", opts.positive_rate},
             {"seller_noise", opts.seller_noise},
             {"lost_fraction", opts.lost_fraction},
             {"creation_week_min", opts.creation_week_min},
             {"creation_week_max", opts.creation_week_max},
             {"interactions", opts.interactions},
             {"coef_scale", opts.coefficient_scale}};
  write_manifest(dir / "manifest.json", "simulate", std::move(flags), {}, std::move(outputs));
  return 0;
}

// ---------------------------------------------------------------------------
// assemble

struct AssembleOpts {
  std::string target;
  std::string data_dir;
  std::string out_file;
  bool no_seasonality = false;
  bool no_recency = false;
  std::string extra_quarters;
  std::string continuous = "lead_age,seller_rating";
  bool strict = false;
};

int run_assemble(const AssembleOpts& opts) {
  WarningSink warnings(opts.strict);
  leadscore::Quarter target;
  try {
    target = leadscore::Quarter::parse(opts.target);
  } catch (const leadscore::ParseError& e) {
    throw UsageError(e.what());
  }
  leadscore::CompositionPolicy policy;
  policy.use_seasonality = !opts.no_seasonality;
  policy.use_recency = !opts.no_recency;
  policy.extra_quarters = parse_quarter_list(opts.extra_quarters);

  auto sources = leadscore::resolve_sources(target, policy);
  fs::path dir(opts.data_dir);
  leadscore::DataStore store;
  std::vector<std::string> inputs;
  std::optional<leadscore::SchemaSpec> schema;
  for (const auto& quarter : sources) {
    fs::path snap_path = snapshot_file(dir, quarter);
    fs::path out_path = outcome_file(dir, quarter);
    if (!fs::exists(snap_path) || !fs::exists(out_path)) {
      throw leadscore::ConfigError("missing data for source quarter " + quarter.str() +
                                   " under " + dir.string());
    }
    if (!schema) schema = infer_schema(snap_path, split_list(opts.continuous));
    auto snap_in = open_input(snap_path);
    store.snapshots[quarter] = leadscore::parse_snapshot_csv(snap_in, *schema);
    auto out_in = open_input(out_path);
    store.outcomes[quarter] = leadscore::parse_outcome_csv(out_in);
    inputs.push_back(snap_path.string());
    inputs.push_back(out_path.string());
  }

  auto composed = leadscore::compose_training_set(target, policy, store);
  if (composed.dropped_leads > 0) {
    warnings.warn(std::to_string(composed.dropped_leads) +
                  " lead(s) had snapshots but no outcome record; dropped");
  }
  if (composed.excluded_post_win > 0) {
    warnings.warn(std::to_string(composed.excluded_post_win) +
                  " snapshot(s) at or after the recorded win week; excluded");
  }

  fs::path out_path(opts.out_file);
  {
    auto out = open_output(out_path);
    leadscore::write_training_csv(out, composed.set.rows, *schema);
  }

  json resolved = json::array();
  for (const auto& q : composed.set.source_quarters) resolved.push_back(q.str());
  json flags{{"target", opts.target},
             {"data", opts.data_dir},
             {"no_seasonality", opts.no_seasonality},
             {"no_recency", opts.no_recency},
             {"extra_quarters", opts.extra_quarters},
             {"continuous", opts.continuous},
             {"resolved_sources", resolved},
             {"rows", composed.set.rows.size()}};
  write_manifest(out_path.string() + ".manifest.json", "assemble", std::move(flags),
                 std::move(inputs), {out_path.string()});
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string train_file;
  std::string out_file;
  double l2 = -1;  // <0 means unset -> 1/n
  int max_iters = 500;
  double tolerance = 1e-8;
  std::string target;
  std::string interactions = "lead_age,owner,quarter_of_year,stage";
  std::size_t min_category_count = 5;
  std::string continuous = "lead_age,seller_rating";
  std::string exclude = "seller_rating";
  bool strict = false;
};

int run_train(const TrainOpts& opts) {
  WarningSink warnings(opts.strict);
  fs::path train_path(opts.train_file);
  auto schema = infer_schema(train_path, split_list(opts.continuous));
  auto in = open_input(train_path);
  auto rows = leadscore::read_training_csv(in, schema);
  if (rows.empty()) throw leadscore::ConfigError("training file has no rows");

  leadscore::EncoderConfig encoder;
  encoder.interaction_attributes = split_list(opts.interactions);
  encoder.min_category_count = opts.min_category_count;
  encoder.excluded_attributes = split_list(opts.exclude);

  auto fit = leadscore::fit_vocabulary(rows, encoder);
  for (const auto& message : fit.warnings) warnings.warn(message);
  auto matrix = leadscore::build_design_matrix(rows, fit.vocab, encoder);

  leadscore::TrainConfig config;
  if (opts.l2 >= 0) config.l2 = opts.l2;
  config.max_iterations = opts.max_iters;
  config.tolerance = opts.tolerance;

  leadscore::TrainMeta meta;
  std::set<leadscore::Quarter> quarters;
  for (const auto& row : rows) quarters.insert(row.snapshot.quarter);
  meta.source_quarters.assign(quarters.begin(), quarters.end());
  if (!opts.target.empty()) {
    try {
      meta.target_quarter = leadscore::Quarter::parse(opts.target);
    } catch (const leadscore::ParseError& e) {
      throw UsageError(e.what());
    }
  }

  auto [model, report] =
      leadscore::train(matrix.rows, matrix.labels, fit.vocab, config, std::move(meta));
  if (!report.converged) {
    warnings.warn("training stopped at max_iterations without converging; model still usable");
  }

  fs::path out_path(opts.out_file);
  {
    auto out = open_output(out_path);
    leadscore::save_model(out, model);
  }
  fs::path report_path = out_path;
  report_path.replace_extension(".report.json");
  {
    json r;
    r["converged"] = report.converged;
    r["iterations"] = report.iterations;
    r["l2"] = report.l2;
    r["final_loss"] = report.loss_trajectory.back();
    r["loss_trajectory"] = report.loss_trajectory;
    auto out = open_output(report_path);
    out << r.dump(2) << '\n';
  }

  json flags{{"train", opts.train_file},
             {"l2", report.l2},
             {"max_iters", opts.max_iters},
             {"tolerance", opts.tolerance},
             {"target", opts.target},
             {"interactions", opts.interactions},
             {"min_category_count", opts.min_category_count},
             {"continuous", opts.continuous},
             {"exclude", opts.exclude},
             {"converged", report.converged}};
  write_manifest(out_path.string() + ".manifest.json", "train", std::move(flags),
                 {opts.train_file}, {out_path.string(), report_path.string()});
  return 0;
}

// ---------------------------------------------------------------------------
// score

struct ScoreOpts {
  std::string model_file;
  std::string data_file;
  std::string out_file;
  bool strict = false;
};

int run_score(const ScoreOpts& opts) {
  WarningSink warnings(opts.strict);
  auto model_in = open_input(opts.model_file);
  auto loaded = leadscore::load_model(model_in);
  if (!loaded.fingerprint_ok) {
    warnings.warn("model vocabulary fingerprint mismatch; file may have been edited");
  }
  const auto& model = loaded.model;

  std::vector<std::string> continuous(model.vocab.known_continuous.begin(),
                                      model.vocab.known_continuous.end());
  auto schema = infer_schema(opts.data_file, continuous);
  auto in = open_input(opts.data_file);
  auto batch = leadscore::parse_snapshot_csv(in, schema);

  // Schema compatibility: every attribute the model was fitted on should be
  // present; absent ones only degrade scores, so say so and continue.
  std::set<std::string> columns;
  for (const auto& c : schema.categorical_columns) columns.insert(c);
  for (const auto& c : schema.continuous_columns) columns.insert(c);
  for (const auto& attr : model.vocab.known_categorical) {
    if (attr != leadscore::kQuarterOfYearAttr && !columns.count(attr)) {
      warnings.warn("snapshot file lacks model attribute '" + attr + "'; scoring best-effort");
    }
  }
  for (const auto& attr : model.vocab.known_continuous) {
    if (!columns.count(attr)) {
      warnings.warn("snapshot file lacks model attribute '" + attr + "'; scoring best-effort");
    }
  }

  fs::path out_path(opts.out_file);
  auto out = open_output(out_path);
  out << "lead_id,week,propensity\n";
  for (const auto& snap : batch) {
    auto row = leadscore::encode(snap, snap.week, model.vocab, true);
    double p = leadscore::predict_propensity(model, row);
    out << snap.lead_id << ',' << snap.week.value << ',' << leadscore::format_double(p) << '\n';
  }

  json flags{{"model", opts.model_file}, {"data", opts.data_file}, {"rows", batch.size()}};
  write_manifest(out_path.string() + ".manifest.json", "score", std::move(flags),
                 {opts.model_file, opts.data_file}, {out_path.string()});
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOpts {
  std::string scores_file;
  std::string data_file;
  std::string outcomes_file;
  std::string out_file;
  std::string segment = "geography";
  std::string metric = "gain";
  std::string baseline;
  std::string curves_dir;
  std::string continuous = "lead_age,seller_rating";
  bool strict = false;
};

struct ScoreRow {
  std::string lead_id;
  int week = 0;
  double propensity = 0.0;
};

std::vector<ScoreRow> read_scores_csv(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw leadscore::SchemaError("scores file has no header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "lead_id,week,propensity") {
    throw leadscore::SchemaError("scores header must be lead_id,week,propensity");
  }
  std::vector<ScoreRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    ScoreRow row;
    std::string week, propensity;
    if (!std::getline(fields, row.lead_id, ',') || !std::getline(fields, week, ',') ||
        !std::getline(fields, propensity)) {
      throw leadscore::ParseError("malformed scores row", line_no);
    }
    try {
      row.week = std::stoi(week);
      row.propensity = std::stod(propensity);
    } catch (const std::exception&) {
      throw leadscore::ParseError("malformed scores row", line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_evaluate(const EvaluateOpts& opts) {
  WarningSink warnings(opts.strict);
  leadscore::RankMetric metric;
  if (opts.metric == "gain") {
    metric = leadscore::RankMetric::gain;
  } else if (opts.metric == "auc") {
    metric = leadscore::RankMetric::auc;
  } else {
    throw UsageError("--metric must be gain or auc");
  }
  if (!opts.baseline.empty() && opts.baseline != "seller") {
    throw UsageError("--baseline supports only 'seller'");
  }

  auto scores = read_scores_csv(opts.scores_file);
  auto schema = infer_schema(opts.data_file, split_list(opts.continuous));
  auto snap_in = open_input(opts.data_file);
  auto batch = leadscore::parse_snapshot_csv(snap_in, schema);
  auto out_in = open_input(opts.outcomes_file);
  auto outcomes = leadscore::parse_outcome_csv(out_in);

  std::map<std::string, const leadscore::OutcomeRecord*> outcome_by_lead;
  for (const auto& rec : outcomes) outcome_by_lead.emplace(rec.lead_id, &rec);
  std::map<std::pair<std::string, int>, const leadscore::LeadSnapshot*> snapshot_by_key;
  for (const auto& snap : batch) snapshot_by_key[{snap.lead_id, snap.week.value}] = &snap;

  std::vector<leadscore::ScoredOutcome> scored;
  std::size_t skipped = 0;
  std::set<std::pair<std::string, int>> used_keys;
  for (const auto& row : scores) {
    auto outcome = outcome_by_lead.find(row.lead_id);
    auto snap = snapshot_by_key.find({row.lead_id, row.week});
    if (outcome == outcome_by_lead.end() || snap == snapshot_by_key.end()) {
      ++skipped;
      continue;
    }
    leadscore::ScoredOutcome s;
    s.lead_id = row.lead_id;
    s.score = row.propensity;
    s.label = outcome->second->status == leadscore::OutcomeStatus::won ? 1 : 0;
    s.week = leadscore::WeekIndex{row.week};
    auto seg = snap->second->categoricals.find(opts.segment);
    s.segment = seg == snap->second->categoricals.end() ? std::string() : seg->second;
    scored.push_back(std::move(s));
    used_keys.insert({row.lead_id, row.week});
  }
  if (scored.empty()) {
    throw leadscore::ConfigError("scores join produced zero rows against outcomes/snapshots");
  }
  if (skipped > 0) {
    warnings.warn(std::to_string(skipped) + " score row(s) had no outcome or snapshot; skipped");
  }

  auto report = leadscore::weekly_report(scored, metric);

  fs::path out_path(opts.out_file);
  std::vector<std::string> outputs{out_path.string()};
  {
    auto out = open_output(out_path);
    leadscore::write_report_csv(out, report);
    if (opts.baseline == "seller") {
      // Second block, same layout: the seller's ranking of the same lead-weeks.
      leadscore::SnapshotBatch used;
      for (const auto& snap : batch) {
        if (used_keys.count({snap.lead_id, snap.week.value})) used.push_back(snap);
      }
      auto seller = leadscore::seller_baseline(used, outcomes, opts.segment);
      auto seller_report = leadscore::weekly_report(seller, metric);
      out << '\n';
      leadscore::write_report_csv(out, seller_report);
    }
  }

  if (!opts.curves_dir.empty() && metric == leadscore::RankMetric::gain) {
    fs::path curves(opts.curves_dir);
    fs::create_directories(curves);
    std::map<std::pair<std::string, int>, std::vector<leadscore::ScoredOutcome>> groups;
    for (const auto& s : scored) groups[{s.segment, s.week.value}].push_back(s);
    for (const auto& [key, group] : groups) {
      bool has_positive = false;
      for (const auto& s : group) has_positive |= s.label == 1;
      if (!has_positive) continue;
      auto curve = leadscore::gain_curve(group);
      fs::path file =
          curves / ("curve_" + key.first + "_week" + std::to_string(key.second) + ".csv");
      auto out = open_output(file);
      leadscore::write_gain_curve_csv(out, curve);
      outputs.push_back(file.string());
    }
  }

  json flags{{"scores", opts.scores_file}, {"data", opts.data_file},
             {"outcomes", opts.outcomes_file}, {"segment", opts.segment},
             {"metric", opts.metric},         {"baseline", opts.baseline},
             {"curves", opts.curves_dir},     {"rows", scored.size()}};
  write_manifest(out_path.string() + ".manifest.json", "evaluate", std::move(flags),
                 {opts.scores_file, opts.data_file, opts.outcomes_file}, std::move(outputs));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sales-pipeline win-propensity prediction pipeline"};
  app.set_config("--config", "", "Read flags from a config file; command-line flags win");
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic snapshot/outcome store");
  simulate->add_option("--seed", sim.seed, "Generator seed")->capture_default_str();
  simulate->add_option("--leads", sim.leads, "Leads per quarter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--quarters", sim.quarters, "Comma-separated quarters, e.g. 2013Q1,2013Q4")
      ->required();
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();
  simulate->add_option("--positive-rate", sim.positive_rate, "Target win rate")
      ->check(CLI::Range(0.001, 0.999))
      ->capture_default_str();
  simulate->add_option("--seller-noise", sim.seller_noise, "Seller rating noise stddev")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--lost-fraction", sim.lost_fraction, "P(lost) among non-won leads")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("--creation-week-min", sim.creation_week_min, "Earliest creation week")
      ->check(CLI::Range(1, 13))
      ->capture_default_str();
  simulate->add_option("--creation-week-max", sim.creation_week_max, "Latest creation week")
      ->check(CLI::Range(1, 13))
      ->capture_default_str();
  simulate->add_option("--interactions", sim.interactions, "Week-interaction attributes")
      ->capture_default_str();
  simulate->add_option("--coef-scale", sim.coefficient_scale, "Scale of drawn coefficients")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  AssembleOpts asm_opts;
  auto* assemble =
      app.add_subcommand("assemble", "Compose a labeled training set for a target quarter");
  assemble->add_option("--target", asm_opts.target, "Target quarter, e.g. 2014Q1")->required();
  assemble->add_option("--data", asm_opts.data_dir, "Directory with snapshots_*/outcomes_* files")
      ->required();
  assemble->add_option("--out", asm_opts.out_file, "Training CSV path")->required();
  assemble->add_flag("--no-seasonality", asm_opts.no_seasonality,
                     "Skip the same quarter of the previous year");
  assemble->add_flag("--no-recency", asm_opts.no_recency, "Skip the immediately preceding quarter");
  assemble->add_option("--extra-quarters", asm_opts.extra_quarters, "Additional source quarters");
  assemble->add_option("--continuous", asm_opts.continuous, "Continuous column names")
      ->capture_default_str();
  assemble->add_flag("--strict", asm_opts.strict, "Promote warnings to errors");

  TrainOpts train_opts;
  auto* train = app.add_subcommand("train", "Fit the regularized logistic scorer");
  train->add_option("--train", train_opts.train_file, "Training CSV")->required();
  train->add_option("--out", train_opts.out_file, "Model file path")->required();
  train->add_option("--l2", train_opts.l2, "L2 strength; default 1/n")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--max-iters", train_opts.max_iters, "Iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--tolerance", train_opts.tolerance, "Relative loss-decrease stop")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--target", train_opts.target, "Target quarter recorded in the model");
  train->add_option("--interactions", train_opts.interactions, "Week-interaction attributes")
      ->capture_default_str();
  train->add_option("--min-category-count", train_opts.min_category_count,
                    "Categories rarer than this collapse to OTHER")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--continuous", train_opts.continuous, "Continuous column names")
      ->capture_default_str();
  train->add_option("--exclude", train_opts.exclude, "Columns kept out of the feature set")
      ->capture_default_str();
  train->add_flag("--strict", train_opts.strict, "Promote warnings to errors");

  ScoreOpts score_opts;
  auto* score = app.add_subcommand("score", "Score snapshots with a trained model");
  score->add_option("--model", score_opts.model_file, "Model file")->required();
  score->add_option("--data", score_opts.data_file, "Snapshot CSV to score")->required();
  score->add_option("--out", score_opts.out_file, "Scores CSV path")->required();
  score->add_flag("--strict", score_opts.strict, "Promote warnings to errors");

  EvaluateOpts eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Weekly-by-segment ranking report");
  evaluate->add_option("--scores", eval_opts.scores_file, "Scores CSV")->required();
  evaluate->add_option("--data", eval_opts.data_file, "Snapshot CSV the scores came from")
      ->required();
  evaluate->add_option("--outcomes", eval_opts.outcomes_file, "Outcome CSV")->required();
  evaluate->add_option("--out", eval_opts.out_file, "Report CSV path")->required();
  evaluate->add_option("--segment", eval_opts.segment, "Segment attribute")->capture_default_str();
  evaluate->add_option("--metric", eval_opts.metric, "gain or auc")->capture_default_str();
  evaluate->add_option("--baseline", eval_opts.baseline, "Also report the seller baseline block");
  evaluate->add_option("--curves", eval_opts.curves_dir, "Directory for per-cell gain curves");
  evaluate->add_option("--continuous", eval_opts.continuous, "Continuous column names")
      ->capture_default_str();
  evaluate->add_flag("--strict", eval_opts.strict, "Promote warnings to errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (assemble->parsed()) return run_assemble(asm_opts);
    if (train->parsed()) return run_train(train_opts);
    if (score->parsed()) return run_score(score_opts);
    if (evaluate->parsed()) return run_evaluate(eval_opts);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const leadscore::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
