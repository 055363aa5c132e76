// taldiag: evaluation and failure-mode diagnosis for temporal action
// detection results.
//
//   taldiag evaluate  --ground-truth gt.json --predictions pred.json
//   taldiag diagnose  --ground-truth gt.json --predictions pred.json
//                     --characteristics char.json --output-dir out
//   taldiag validate  --ground-truth gt.json [--predictions ...]
//   taldiag synth     --output-dir out --seed 17
//
// Exit codes: 0 success, 1 validation failure, 2 I/O or parse failure.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <sstream>

#include "CLI11.hpp"

#include "taldiag/analysis.hpp"
#include "taldiag/csv.hpp"
#include "taldiag/loaders.hpp"
#include "taldiag/report.hpp"
#include "taldiag/svg.hpp"
#include "taldiag/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using namespace taldiag;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct CommonArgs {
  std::string ground_truth;
  std::vector<std::string> predictions;
  std::string characteristics;
  std::vector<double> thresholds;
  std::string threshold_spec;
  double normalization = 0.0;
  bool normalization_set = false;
  int top_k_factor = 10;
  std::string subset;
  std::string output_dir;
  std::string format = "all";
};

void add_common_options(CLI::App* cmd, CommonArgs& args, bool predictions_required) {
  cmd->add_option("--ground-truth", args.ground_truth, "ground-truth JSON file")
      ->required();
  auto* preds = cmd->add_option("--predictions", args.predictions,
                                "prediction JSON file (repeatable)");
  if (predictions_required) preds->required();
  cmd->add_option("--characteristics", args.characteristics,
                  "per-instance characteristics JSON file");
  cmd->add_option("--tiou-thresholds", args.threshold_spec,
                  "comma list (0.5,0.75) or range lo:step:hi (default 0.5:0.05:0.95)");
  cmd->add_option("--normalization-constant", args.normalization,
                  "normalized-precision constant N (default: mean instances per class)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--top-k-factor", args.top_k_factor, "k of the top-kG truncation")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--subset", args.subset, "evaluate only videos with this subset tag");
}

std::vector<double> parse_thresholds(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo = 0.0, step = 0.0, hi = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &step, &hi) != 3 || step <= 0.0) {
      throw CLI::ValidationError("--tiou-thresholds", "expected lo:step:hi");
    }
    for (double t = lo; t <= hi + 1e-9; t += step) out.push_back(t);
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--tiou-thresholds", "not a number: " + item);
    }
  }
  return out;
}

EvaluationConfig make_config(const CommonArgs& args) {
  EvaluationConfig config;
  if (!args.threshold_spec.empty()) config.tiou_thresholds = parse_thresholds(args.threshold_spec);
  if (args.normalization_set) config.normalization_constant = args.normalization;
  config.top_k_factor = args.top_k_factor;
  validate_config(config);
  return config;
}

void print_issues(const std::vector<ValidationIssue>& issues, const char* kind) {
  for (const auto& issue : issues) {
    std::cerr << kind << ": " << issue.location << ": " << issue.message << "\n";
  }
}

struct LoadedInputs {
  Dataset dataset;
  std::vector<std::vector<Prediction>> prediction_sets;
  std::vector<std::string> method_names;
  bool has_characteristics = false;
};

LoadedInputs load_inputs(const CommonArgs& args) {
  LoadedInputs inputs;
  const std::optional<std::string> subset =
      args.subset.empty() ? std::nullopt : std::make_optional(args.subset);
  GroundTruthLoad gt = load_ground_truth(args.ground_truth, subset);
  print_issues(gt.warnings, "warning");
  inputs.dataset = std::move(gt.dataset);

  if (!args.characteristics.empty()) {
    const auto warnings = load_characteristics(args.characteristics, inputs.dataset);
    print_issues(warnings, "warning");
    inputs.has_characteristics = true;
  }

  for (const std::string& path : args.predictions) {
    PredictionsLoad preds = load_predictions(path, inputs.dataset);
    print_issues(preds.warnings, "warning");
    inputs.prediction_sets.push_back(std::move(preds.predictions));
    std::string name = fs::path(path).stem().string();
    int copy = 1;
    while (std::find(inputs.method_names.begin(), inputs.method_names.end(), name) !=
           inputs.method_names.end()) {
      name = fs::path(path).stem().string() + "_" + std::to_string(++copy);
    }
    inputs.method_names.push_back(std::move(name));
  }
  return inputs;
}

Provenance::Input input_record(const std::string& role, const std::string& path) {
  return {role, path, file_digest(path)};
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void print_metrics_table(const std::string& name, const OverallMetrics& m, int top_k) {
  std::printf("%-20s %14s %14s %16s %16s\n", name.c_str(), "avg-mAP(all)",
              ("avg-mAP(top" + std::to_string(top_k) + "G)").c_str(), "avg-mAP_N(all)",
              ("avg-mAP_N(top" + std::to_string(top_k) + "G)").c_str());
  std::printf("%-20s %14.2f %14.2f %16.2f %16.2f\n", "", m.standard_all.average * 100.0,
              m.standard_top_k.average * 100.0, m.normalized_all.average * 100.0,
              m.normalized_top_k.average * 100.0);
  std::printf("\n%-10s %10s %14s\n", "threshold", "mAP(%)", "mAP_N(%)");
  for (std::size_t t = 0; t < m.standard_all.thresholds.size(); ++t) {
    std::printf("%-10.2f %10.2f %14.2f\n", m.standard_all.thresholds[t],
                m.standard_all.per_threshold_map[t] * 100.0,
                m.normalized_all.per_threshold_map[t] * 100.0);
  }
}

void write_bundle(const fs::path& dir, const DiagnosisReport& report, const Dataset& dataset,
                  std::span<const Prediction> predictions, const std::string& format) {
  fs::create_directories(dir);
  const bool want_json = format == "json" || format == "all";
  const bool want_csv = format == "csv" || format == "all";
  const bool want_svg = format == "svg" || format == "all";

  if (want_json) write_text(dir / "report.json", dump_json_fixed(report_to_json(report)));

  if (want_csv) {
    EvaluationContext context(dataset, predictions);
    const VerdictTable verdicts = classify_all(context, report.config);
    write_verdicts_csv(dir / "verdicts.csv", context, verdicts);
    write_fp_profile_csv(dir / "fp_profile.csv", report.fp_profile);
    write_error_impact_csv(dir / "error_impact.csv", report.impact);
    if (report.sensitivity) {
      write_sensitivity_csv(dir / "sensitivity.csv", *report.sensitivity);
      write_sensitivity_summary_csv(dir / "sensitivity_summary.csv", *report.sensitivity);
    }
    if (report.false_negatives) {
      write_fn_rates_csv(dir / "fn_rates.csv", *report.false_negatives);
      for (const auto& pair : report.false_negatives->pairwise) {
        const std::string name = "fn_pairwise_" + std::string(to_string(pair.rows)) + "_x_" +
                                 std::string(to_string(pair.cols)) + ".csv";
        write_fn_pairwise_csv(dir / name, pair);
      }
    }
  }

  if (want_svg) {
    write_text(dir / "fp_profile.svg", fp_profile_svg(report.fp_profile));
    write_text(dir / "error_impact.svg", error_impact_svg(report.impact));
    if (report.sensitivity) {
      write_text(dir / "sensitivity.svg", sensitivity_svg(*report.sensitivity));
      write_text(dir / "sensitivity_summary.svg",
                 sensitivity_summary_svg(*report.sensitivity));
    }
    if (report.false_negatives) {
      write_text(dir / "fn_rates.svg", fn_rates_svg(*report.false_negatives));
      for (const auto& pair : report.false_negatives->pairwise) {
        const std::string name = "fn_pairwise_" + std::string(to_string(pair.rows)) + "_x_" +
                                 std::string(to_string(pair.cols)) + ".svg";
        write_text(dir / name, fn_pairwise_svg(pair));
      }
    }
  }
}

int run_evaluate(const CommonArgs& args) {
  const LoadedInputs inputs = load_inputs(args);
  const EvaluationConfig config = make_config(args);
  for (std::size_t i = 0; i < inputs.prediction_sets.size(); ++i) {
    const auto& predictions = inputs.prediction_sets[i];
    EvaluationConfig resolved = config;
    resolved.normalization_constant =
        resolve_normalization_constant(config, inputs.dataset);
    const std::vector<Prediction> top_k =
        truncate_top_k(predictions, inputs.dataset, config.top_k_factor);
    OverallMetrics metrics;
    metrics.standard_all = average_map(inputs.dataset, predictions, resolved, false);
    metrics.normalized_all = average_map(inputs.dataset, predictions, resolved, true);
    metrics.standard_top_k = average_map(inputs.dataset, top_k, resolved, false);
    metrics.normalized_top_k = average_map(inputs.dataset, top_k, resolved, true);
    print_metrics_table(inputs.method_names[i], metrics, config.top_k_factor);
    if (!args.output_dir.empty()) {
      DiagnosisReport report;
      report.config = resolved;
      report.resolved_normalization = *resolved.normalization_constant;
      report.metrics = metrics;
      const fs::path dir = inputs.prediction_sets.size() == 1
                               ? fs::path(args.output_dir)
                               : fs::path(args.output_dir) / inputs.method_names[i];
      fs::create_directories(dir);
      nlohmann::ordered_json doc = report_to_json(report);
      write_text(dir / "metrics.json",
                 dump_json_fixed({{"schema_version", kReportSchemaVersion},
                                  {"config", doc["config"]},
                                  {"metrics", doc["metrics"]}}));
    }
  }
  return kExitOk;
}

int run_diagnose(const CommonArgs& args) {
  const LoadedInputs inputs = load_inputs(args);
  DiagnosisOptions options;
  options.config = make_config(args);
  if (!args.subset.empty()) options.subset = args.subset;

  const fs::path out_root = args.output_dir.empty() ? fs::path(".") : fs::path(args.output_dir);
  std::vector<FNReport> fn_reports;
  for (std::size_t i = 0; i < inputs.prediction_sets.size(); ++i) {
    DiagnosisReport report = diagnose(inputs.dataset, inputs.prediction_sets[i], options);
    report.provenance.inputs.push_back(input_record("ground_truth", args.ground_truth));
    report.provenance.inputs.push_back(input_record("predictions", args.predictions[i]));
    if (!args.characteristics.empty()) {
      report.provenance.inputs.push_back(
          input_record("characteristics", args.characteristics));
    }
    for (const auto& notice : report.notices) std::cerr << "notice: " << notice << "\n";
    if (report.sensitivity) {
      for (const auto& notice : report.sensitivity->notices) {
        std::cerr << "notice: " << notice << "\n";
      }
    }
    const fs::path dir = inputs.prediction_sets.size() == 1
                             ? out_root
                             : out_root / inputs.method_names[i];
    write_bundle(dir, report, inputs.dataset, inputs.prediction_sets[i], args.format);
    if (report.false_negatives) fn_reports.push_back(*report.false_negatives);
    std::printf("%s: average-mAP %.2f%%, average-mAP_N %.2f%% -> %s\n",
                inputs.method_names[i].c_str(), report.metrics.standard_all.average * 100.0,
                report.metrics.normalized_all.average * 100.0, dir.string().c_str());
  }

  if (fn_reports.size() > 1) {
    const FNReport averaged = average_fn_reports(fn_reports);
    if (args.format == "json" || args.format == "all") {
      write_text(out_root / "fn_average.json", dump_json_fixed(fn_report_to_json(averaged)));
    }
    if (args.format == "csv" || args.format == "all") {
      write_fn_rates_csv(out_root / "fn_average.csv", averaged);
    }
    if (args.format == "svg" || args.format == "all") {
      write_text(out_root / "fn_average.svg", fn_rates_svg(averaged));
    }
  }
  return kExitOk;
}

int run_validate(const CommonArgs& args) {
  const LoadedInputs inputs = load_inputs(args);
  const auto issues = validate_dataset(inputs.dataset);
  if (!issues.empty()) {
    print_issues(issues, "error");
    return kExitValidation;
  }
  std::printf("ok: %zu video(s), %zu instance(s), %zu class(es)",
              inputs.dataset.videos.size(), inputs.dataset.instances.size(),
              inputs.dataset.class_index.size());
  std::size_t total_predictions = 0;
  for (const auto& set : inputs.prediction_sets) total_predictions += set.size();
  if (!inputs.prediction_sets.empty()) std::printf(", %zu prediction(s)", total_predictions);
  std::printf("\n");
  return kExitOk;
}

struct SynthArgs {
  std::string output_dir;
  std::uint64_t seed = 17;
  int classes = 10;
  int videos = 120;
  int predictions = 1000;
  double planting_alpha = 0.5;
  std::string mixture;
  std::vector<std::string> degrade;
};

int run_synth(const SynthArgs& args) {
  SyntheticSpec spec;
  spec.seed = args.seed;
  spec.num_classes = args.classes;
  spec.num_videos = args.videos;
  spec.num_predictions = args.predictions;
  spec.planting_alpha = args.planting_alpha;
  if (!args.mixture.empty()) {
    // e.g. "tp=0.5,dd=0.1,wl=0.1,loc=0.2,con=0.05,bg=0.05"
    spec.mixture = {};
    std::stringstream ss(args.mixture);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) {
        throw CLI::ValidationError("--mixture", "expected name=value pairs");
      }
      std::string name = item.substr(0, eq);
      for (char& c : name) c = static_cast<char>(std::toupper(c));
      const auto category = category_from_code(name);
      if (!category) throw CLI::ValidationError("--mixture", "unknown category " + name);
      spec.mixture[static_cast<std::size_t>(*category)] = std::stod(item.substr(eq + 1));
    }
  }
  for (const std::string& item : args.degrade) {
    // e.g. "coverage:XS"
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw CLI::ValidationError("--degrade", "expected characteristic:bucket");
    }
    const auto characteristic = characteristic_from_string(item.substr(0, colon));
    if (!characteristic) {
      throw CLI::ValidationError("--degrade", "unknown characteristic in " + item);
    }
    spec.degrade.emplace_back(*characteristic, item.substr(colon + 1));
  }

  const SyntheticOutput output = generate_synthetic(spec);
  write_synthetic_files(output, args.output_dir);
  std::printf("wrote %s: %zu video(s), %zu instance(s), %zu prediction(s)\n",
              args.output_dir.c_str(), output.dataset.videos.size(),
              output.dataset.instances.size(), output.predictions.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"temporal action detection evaluation and error diagnosis"};
  app.require_subcommand(1);

  CommonArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "compute detection metrics");
  add_common_options(evaluate, eval_args, /*predictions_required=*/true);
  evaluate->add_option("--output-dir", eval_args.output_dir, "write metrics.json here");
  evaluate
      ->add_option("--format", eval_args.format, "output selection: json,csv,svg,all")
      ->check(CLI::IsMember({"json", "csv", "svg", "all"}));

  CommonArgs diag_args;
  CLI::App* diagnose_cmd = app.add_subcommand("diagnose", "full failure-mode diagnosis");
  add_common_options(diagnose_cmd, diag_args, /*predictions_required=*/true);
  diagnose_cmd->add_option("--output-dir", diag_args.output_dir, "report bundle directory");
  diagnose_cmd
      ->add_option("--format", diag_args.format, "output selection: json,csv,svg,all")
      ->check(CLI::IsMember({"json", "csv", "svg", "all"}));

  CommonArgs validate_args;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check inputs against the schema");
  add_common_options(validate_cmd, validate_args, /*predictions_required=*/false);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark");
  synth->add_option("--output-dir", synth_args.output_dir, "destination directory")
      ->required();
  synth->add_option("--seed", synth_args.seed, "generator seed");
  synth->add_option("--classes", synth_args.classes, "number of action classes")
      ->check(CLI::PositiveNumber);
  synth->add_option("--videos", synth_args.videos, "number of videos")
      ->check(CLI::PositiveNumber);
  synth->add_option("--num-predictions", synth_args.predictions, "prediction count")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--planting-alpha", synth_args.planting_alpha,
                    "threshold the errors are planted against");
  synth->add_option("--mixture", synth_args.mixture,
                    "category proportions, e.g. tp=0.5,dd=0.1,wl=0.1,loc=0.2,con=0.05,bg=0.05");
  synth->add_option("--degrade", synth_args.degrade,
                    "leave a bucket undetected, e.g. coverage:XS (repeatable)");

  // mark presence of optional numeric flags
  eval_args.normalization_set = false;
  diag_args.normalization_set = false;

  try {
    app.parse(argc, argv);
    if (evaluate->parsed()) {
      eval_args.normalization_set = evaluate->count("--normalization-constant") > 0;
      return run_evaluate(eval_args);
    }
    if (diagnose_cmd->parsed()) {
      diag_args.normalization_set = diagnose_cmd->count("--normalization-constant") > 0;
      return run_diagnose(diag_args);
    }
    if (validate_cmd->parsed()) {
      validate_args.normalization_set =
          validate_cmd->count("--normalization-constant") > 0;
      return run_validate(validate_args);
    }
    if (synth->parsed()) return run_synth(synth_args);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitIo;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
