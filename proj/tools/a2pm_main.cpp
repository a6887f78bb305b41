// Command-line front end: preprocess, attack, augment, evaluate, validate.
// Exit codes: 0 success, 1 validation findings, 2 config error, 3 data error,
// 4 oracle error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "a2pm/attack.hpp"
#include "a2pm/config.hpp"
#include "a2pm/error.hpp"
#include "a2pm/oracle.hpp"
#include "a2pm/pipeline.hpp"
#include "a2pm/realism.hpp"
#include "a2pm/report.hpp"
#include "a2pm/state_io.hpp"

namespace fs = std::filesystem;
using namespace a2pm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitOracle = 4;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string oracle_cmd;
  bool quiet = false;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::unique_ptr<ModelOracle> make_oracle(const RunConfig& config,
                                         const CommonFlags& flags,
                                         const Dataset& fit_data) {
  if (!flags.oracle_cmd.empty() ||
      config.oracle.kind == OracleSettings::Kind::External) {
    ExternalOracle::Options options;
    options.timeout = config.oracle.timeout;
    options.class_count = static_cast<int>(fit_data.schema.class_count());
    const std::string& cmd =
        flags.oracle_cmd.empty() ? config.oracle.command : flags.oracle_cmd;
    if (cmd.empty()) throw ConfigError("external oracle has no command");
    return std::make_unique<ExternalOracle>(cmd, options);
  }
  return std::make_unique<NearestCentroidModel>(NearestCentroidModel::fit(fit_data));
}

void print_class_counts(const std::vector<std::string>& names,
                        const std::vector<std::size_t>& total,
                        const std::vector<std::size_t>& train,
                        const std::vector<std::size_t>& eval_counts) {
  std::size_t width = 5;
  for (const auto& n : names) width = std::max(width, n.size());
  std::printf("%-*s  %10s  %10s  %10s\n", static_cast<int>(width), "Class", "Samples",
              "Train", "Eval");
  for (std::size_t c = 0; c < names.size(); ++c)
    std::printf("%-*s  %10zu  %10zu  %10zu\n", static_cast<int>(width), names[c].c_str(),
                total[c], train[c], eval_counts[c]);
}

int cmd_preprocess(const CommonFlags& flags, const std::string& in_csv) {
  RunConfig config = load_run_config(flags.config_path);
  if (flags.seed) config.pipeline.split_seed = *flags.seed;

  const RawTable table = load_csv(in_csv, config.pipeline);
  const auto label_col = *table.column_index(config.pipeline.label_column);

  // Stratified split happens on the raw rows, then the encoding is fitted on
  // the training side only, so held-out rows never leak categories.
  std::vector<std::string> class_names;
  std::vector<int> labels;
  for (const auto& row : table.rows) {
    const auto& label = row[label_col];
    auto it = std::find(class_names.begin(), class_names.end(), label);
    if (it == class_names.end()) {
      class_names.push_back(label);
      it = class_names.end() - 1;
    }
    labels.push_back(static_cast<int>(it - class_names.begin()));
  }

  const auto [train_idx, eval_idx] =
      stratified_indices(labels, class_names.size(), config.pipeline.holdout_fraction,
                         config.pipeline.split_seed, class_names);

  const auto subset = [&](const std::vector<std::size_t>& indices) {
    RawTable out;
    out.column_names = table.column_names;
    for (std::size_t i : indices) out.rows.push_back(table.rows[i]);
    return out;
  };
  const RawTable train_table = subset(train_idx);
  const RawTable eval_table = subset(eval_idx);

  PreprocessResult fitted = preprocess(train_table, config.pipeline);
  Dataset eval_ds =
      apply_encoding(eval_table, config.pipeline, fitted.schema, fitted.encoding);

  const fs::path out_dir(flags.out_dir);
  fs::create_directories(out_dir);
  write_csv(fitted.dataset, out_dir / "train.csv");
  write_csv(eval_ds, out_dir / "eval.csv");
  save_schema(fitted.schema, out_dir / "schema.json");
  save_encoding(fitted.encoding, out_dir / "encoding.json");

  if (!flags.quiet) {
    std::vector<std::size_t> total(class_names.size(), 0);
    std::vector<std::size_t> train_counts(class_names.size(), 0);
    std::vector<std::size_t> eval_counts(class_names.size(), 0);
    for (int l : labels) ++total[static_cast<std::size_t>(l)];
    for (std::size_t i : train_idx) ++train_counts[static_cast<std::size_t>(labels[i])];
    for (std::size_t i : eval_idx) ++eval_counts[static_cast<std::size_t>(labels[i])];
    // the fitted schema may reorder classes; report in raw appearance order
    print_class_counts(class_names, total, train_counts, eval_counts);
    std::printf("wrote train.csv eval.csv schema.json encoding.json to %s\n",
                out_dir.string().c_str());
  }
  return kExitOk;
}

int cmd_attack(const CommonFlags& flags, const std::string& data_csv,
               const std::string& schema_path) {
  RunConfig config = load_run_config(flags.config_path);
  if (flags.seed) config.attack.seed = *flags.seed;

  const FeatureSchema schema = load_schema(schema_path);
  // resolve and validate the whole configuration before touching the data
  const BaseConfig base = resolve_patterns(config, schema);
  const AttackConfig attack_cfg = resolve_attack(config, schema);
  const Dataset data = read_dataset(data_csv, schema);

  A2pmState state(schema, base);
  auto oracle = make_oracle(config, flags, data);

  const auto on_iteration = [&](std::size_t iter, const IterationRecord& rec) {
    if (flags.quiet) return;
    std::printf("iter %zu: generated %zu, new successes %zu\n", iter,
                rec.timing.examples, rec.new_successes);
    std::fflush(stdout);
  };
  const AttackResult result = run_attack(state, *oracle, data, attack_cfg, on_iteration);

  Dataset adversarial;
  adversarial.schema = schema;
  adversarial.values = result.adversarial;
  adversarial.labels = data.labels;

  std::optional<MetricReport> final_metrics;
  if (data.size() > 0) {
    const std::vector<int> preds = oracle->predict(result.adversarial);
    std::vector<int> excluded;
    for (const auto& name : config.excluded_classes)
      excluded.push_back(*schema.class_index(name));
    final_metrics = evaluate_predictions(data.labels, preds, excluded);
  }

  const fs::path out_dir(flags.out_dir);
  fs::create_directories(out_dir);
  write_csv(adversarial, out_dir / "adversarial.csv");
  write_file(out_dir / "report.json",
             report_to_json(result, final_metrics ? &*final_metrics : nullptr));
  save_state(state, out_dir / "state.json");

  if (!flags.quiet) {
    std::fputs(
        render_report_text(result, final_metrics ? &*final_metrics : nullptr).c_str(),
        stdout);
    std::printf("wrote adversarial.csv report.json state.json to %s\n",
                out_dir.string().c_str());
  }
  return kExitOk;
}

int cmd_augment(const CommonFlags& flags, const std::string& train_csv,
                const std::string& schema_path, const std::string& out_csv) {
  RunConfig config = load_run_config(flags.config_path);
  const std::uint64_t seed = flags.seed ? *flags.seed : config.attack.seed;

  const FeatureSchema schema = load_schema(schema_path);
  const Dataset train = read_dataset(train_csv, schema);
  const BaseConfig base = resolve_patterns(config, schema);

  // Adapted solely to the training data, one extra example per malicious row.
  A2pmState state(schema, base);
  state.fit(train);
  const Dataset augmented = augment_training(state, train, RngStream(seed));

  write_csv(augmented, out_csv);
  if (!flags.quiet)
    std::printf("original rows: %zu, added: %zu, total: %zu\n", train.size(),
                augmented.size() - train.size(), augmented.size());
  return kExitOk;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& pred_csv,
                 const std::string& true_csv, const std::string& data_csv,
                 const std::string& schema_path,
                 const std::vector<std::string>& excluded_names) {
  MetricReport report;

  if (!data_csv.empty()) {
    if (schema_path.empty())
      throw ConfigError("evaluate with --data also needs --schema");
    const FeatureSchema schema = load_schema(schema_path);
    const Dataset data = read_dataset(data_csv, schema);
    RunConfig config;
    if (!flags.config_path.empty()) config = load_run_config(flags.config_path);
    auto oracle = make_oracle(config, flags, data);
    const std::vector<int> preds = oracle->predict(data.values);
    std::vector<int> excluded;
    for (const auto& name : excluded_names) {
      const auto cls = schema.class_index(name);
      if (!cls) throw ConfigError("excluded class '" + name + "' not in schema");
      excluded.push_back(*cls);
    }
    report = evaluate_predictions(data.labels, preds, excluded);
  } else {
    if (pred_csv.empty() || true_csv.empty())
      throw ConfigError("evaluate needs --pred and --true, or --data and --schema");
    const auto pred_names = read_label_column(pred_csv);
    const auto true_names = read_label_column(true_csv);
    if (pred_names.size() != true_names.size())
      throw DataError("prediction and truth files differ in length: " +
                      std::to_string(pred_names.size()) + " vs " +
                      std::to_string(true_names.size()));

    std::vector<std::string> vocab;
    const auto to_index = [&](const std::string& name) {
      auto it = std::find(vocab.begin(), vocab.end(), name);
      if (it == vocab.end()) {
        vocab.push_back(name);
        it = vocab.end() - 1;
      }
      return static_cast<int>(it - vocab.begin());
    };
    std::vector<int> y_true;
    std::vector<int> y_pred;
    for (const auto& name : true_names) y_true.push_back(to_index(name));
    for (const auto& name : pred_names) y_pred.push_back(to_index(name));
    std::vector<int> excluded;
    for (const auto& name : excluded_names) {
      auto it = std::find(vocab.begin(), vocab.end(), name);
      if (it != vocab.end())
        excluded.push_back(static_cast<int>(it - vocab.begin()));
    }
    report = evaluate_predictions(y_true, y_pred, excluded);
  }

  std::fputs(render_metric_text(report).c_str(), stdout);
  if (!flags.out_dir.empty()) {
    fs::create_directories(flags.out_dir);
    write_file(fs::path(flags.out_dir) / "metrics.json", metric_report_to_json(report));
  }
  return kExitOk;
}

int cmd_validate(const CommonFlags& flags, const std::string& adversarial_csv,
                 const std::string& original_csv, const std::string& schema_path,
                 const std::string& state_path) {
  const FeatureSchema schema = load_schema(schema_path);
  const A2pmState state = load_state(state_path);
  if (state.schema() != schema)
    throw DataError("schema.json does not match the schema embedded in the state file");

  const Dataset adversarial = read_dataset(adversarial_csv, schema);
  const Dataset original = read_dataset(original_csv, schema);

  const auto violations = realism_check(adversarial, original, state);
  if (!flags.quiet || !violations.empty())
    std::fputs(realism_summary(violations).c_str(), stdout);
  return violations.empty() ? kExitOk : kExitFindings;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptative perturbation patterns: realistic adversarial examples "
               "for tabular data"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CommonFlags flags;
  app.add_option("--config", flags.config_path, "JSON run configuration");
  app.add_option("--seed", flags.seed, "Override the configured seed");
  app.add_option("--out", flags.out_dir, "Output directory");
  app.add_option("--oracle-cmd", flags.oracle_cmd,
                 "External oracle command (overrides the config)");
  app.add_flag("--quiet", flags.quiet, "Suppress progress output");

  std::string in_csv;
  auto* preprocess_cmd =
      app.add_subcommand("preprocess", "Split, encode and write train/eval sets");
  preprocess_cmd->add_option("--in", in_csv, "Raw flow CSV")->required();

  std::string data_csv;
  std::string schema_path;
  auto* attack_cmd = app.add_subcommand("attack", "Run the configured attack");
  attack_cmd->add_option("--data", data_csv, "Encoded dataset CSV")->required();
  attack_cmd->add_option("--schema", schema_path, "schema.json")->required();

  std::string train_csv;
  std::string out_csv;
  auto* augment_cmd =
      app.add_subcommand("augment", "Add one adversarial example per malicious row");
  augment_cmd->add_option("--train", train_csv, "Encoded training CSV")->required();
  augment_cmd->add_option("--schema", schema_path, "schema.json");
  augment_cmd->add_option("--out-csv", out_csv, "Augmented CSV path")->required();

  std::string pred_csv;
  std::string true_csv;
  std::vector<std::string> excluded_names;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute accuracy and macro-F1");
  evaluate_cmd->add_option("--pred", pred_csv, "Predictions CSV (label column last)");
  evaluate_cmd->add_option("--true", true_csv, "Ground-truth CSV (label column last)");
  evaluate_cmd->add_option("--data", data_csv, "Dataset CSV to run the oracle on");
  evaluate_cmd->add_option("--schema", schema_path, "schema.json");
  evaluate_cmd->add_option("--exclude", excluded_names,
                           "Class names excluded from accuracy");

  std::string adversarial_csv;
  std::string original_csv;
  std::string state_path;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check adversarial rows for realism violations");
  validate_cmd->add_option("--adversarial", adversarial_csv, "Adversarial CSV")
      ->required();
  validate_cmd->add_option("--original", original_csv, "Original CSV")->required();
  validate_cmd->add_option("--schema", schema_path, "schema.json")->required();
  validate_cmd->add_option("--state", state_path, "Fitted state.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (preprocess_cmd->parsed()) return cmd_preprocess(flags, in_csv);
    if (attack_cmd->parsed()) return cmd_attack(flags, data_csv, schema_path);
    if (augment_cmd->parsed()) {
      if (schema_path.empty()) throw ConfigError("augment needs --schema");
      return cmd_augment(flags, train_csv, schema_path, out_csv);
    }
    if (evaluate_cmd->parsed())
      return cmd_evaluate(flags, pred_csv, true_csv, data_csv, schema_path,
                          excluded_names);
    if (validate_cmd->parsed())
      return cmd_validate(flags, adversarial_csv, original_csv, schema_path, state_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const AttackError& e) {
    std::cerr << "attack aborted: " << e.what() << '\n';
    return kExitOracle;
  } catch (const OracleError& e) {
    std::cerr << "oracle error: " << e.what() << '\n';
    return kExitOracle;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}
