#include "taldiag/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace taldiag {

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return fnv1a64_hex(os.str());
}

std::string current_timestamp_utc() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

namespace {

constexpr double kPercent = 100.0;

using ordered_json = nlohmann::ordered_json;

ordered_json percent(double fraction) { return fraction * kPercent; }

ordered_json percent_or_null(const std::optional<double>& fraction) {
  if (!fraction) return nullptr;
  return *fraction * kPercent;
}

ordered_json metrics_json(const OverallMetrics& m) {
  ordered_json per_threshold = ordered_json::array();
  for (std::size_t t = 0; t < m.standard_all.thresholds.size(); ++t) {
    per_threshold.push_back({
        {"tiou_threshold", m.standard_all.thresholds[t]},
        {"map", percent(m.standard_all.per_threshold_map[t])},
        {"map_normalized", percent(m.normalized_all.per_threshold_map[t])},
        {"map_top_k", percent(m.standard_top_k.per_threshold_map[t])},
        {"map_normalized_top_k", percent(m.normalized_top_k.per_threshold_map[t])},
    });
  }
  return {
      {"units", "percent"},
      {"average_map", {{"all", percent(m.standard_all.average)},
                       {"top_k", percent(m.standard_top_k.average)}}},
      {"average_map_normalized", {{"all", percent(m.normalized_all.average)},
                                  {"top_k", percent(m.normalized_top_k.average)}}},
      {"per_threshold", std::move(per_threshold)},
      {"classes_evaluated", m.standard_all.class_labels.size()},
      {"classes_without_ground_truth", m.standard_all.skipped_classes},
  };
}

ordered_json fp_profile_json(const FPProfile& p) {
  ordered_json splits = ordered_json::array();
  for (std::size_t s = 0; s < p.splits.size(); ++s) {
    const auto& split = p.splits[s];
    ordered_json mean;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      mean[std::string(long_name(static_cast<ErrorCategory>(c)))] = percent(split.mean[c]);
    }
    ordered_json per_threshold = ordered_json::array();
    for (std::size_t t = 0; t < p.thresholds.size(); ++t) {
      ordered_json row;
      row["tiou_threshold"] = p.thresholds[t];
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        row[std::string(long_name(static_cast<ErrorCategory>(c)))] =
            percent(split.per_threshold[t][c]);
      }
      per_threshold.push_back(std::move(row));
    }
    splits.push_back({
        {"split", s + 1},
        {"size", split.size},
        {"mean", std::move(mean)},
        {"per_threshold", std::move(per_threshold)},
    });
  }
  return {
      {"units", "percent"},
      {"top_k_factor", p.top_k_factor},
      {"retained_predictions", p.retained_predictions},
      {"splits", std::move(splits)},
  };
}

ordered_json error_impact_json(const ErrorImpact& impact) {
  ordered_json categories = ordered_json::array();
  for (const auto& entry : impact.categories) {
    ordered_json per_threshold = ordered_json::array();
    for (std::size_t t = 0; t < impact.thresholds.size(); ++t) {
      per_threshold.push_back({
          {"tiou_threshold", impact.thresholds[t]},
          {"map_normalized_after", percent(entry.per_threshold_after[t])},
      });
    }
    categories.push_back({
        {"category", std::string(long_name(entry.category))},
        {"average_map_normalized_after", percent(entry.after_removal)},
        {"delta", percent(entry.delta)},
        {"per_threshold", std::move(per_threshold)},
    });
  }
  return {
      {"units", "percent"},
      {"baseline_average_map_normalized", percent(impact.baseline)},
      {"categories", std::move(categories)},
  };
}

ordered_json sensitivity_json(const SensitivityProfile& profile) {
  ordered_json entries = ordered_json::array();
  for (const auto& entry : profile.entries) {
    ordered_json buckets = ordered_json::array();
    for (const auto& bucket : entry.buckets) {
      buckets.push_back({
          {"bucket", bucket.label},
          {"instances", bucket.instance_count},
          {"average_map_normalized", percent_or_null(bucket.average_map_n)},
      });
    }
    entries.push_back({
        {"characteristic", std::string(to_string(entry.characteristic))},
        {"buckets", std::move(buckets)},
        {"sensitivity", percent(entry.sensitivity)},
        {"impact", percent(entry.impact)},
    });
  }
  return {
      {"units", "percent"},
      {"overall_average_map_normalized", percent(profile.overall)},
      {"characteristics", std::move(entries)},
      {"notices", profile.notices},
  };
}

ordered_json fn_json(const FNReport& report) {
  ordered_json entries = ordered_json::array();
  for (const auto& entry : report.entries) {
    ordered_json buckets = ordered_json::array();
    for (const auto& bucket : entry.buckets) {
      ordered_json rates = ordered_json::array();
      for (std::size_t t = 0; t < bucket.rate_per_threshold.size(); ++t) {
        rates.push_back(percent(bucket.rate_per_threshold[t]));
      }
      ordered_json row = {
          {"bucket", bucket.label},
          {"instances", bucket.instance_count},
          {"mean_rate", bucket.instance_count > 0 ? ordered_json(percent(bucket.mean_rate))
                                                  : ordered_json(nullptr)},
      };
      if (!bucket.rate_per_threshold.empty()) row["rate_per_threshold"] = std::move(rates);
      buckets.push_back(std::move(row));
    }
    entries.push_back({
        {"characteristic", std::string(to_string(entry.characteristic))},
        {"buckets", std::move(buckets)},
    });
  }
  ordered_json pairwise = ordered_json::array();
  for (const auto& grid : report.pairwise) {
    ordered_json cells = ordered_json::array();
    for (const auto& row : grid.cells) {
      ordered_json cell_row = ordered_json::array();
      for (const auto& cell : row) {
        cell_row.push_back({
            {"instances", cell.instance_count},
            {"mean_rate", percent_or_null(cell.mean_rate)},
        });
      }
      cells.push_back(std::move(cell_row));
    }
    pairwise.push_back({
        {"rows", std::string(to_string(grid.rows))},
        {"cols", std::string(to_string(grid.cols))},
        {"row_buckets", grid.row_labels},
        {"col_buckets", grid.col_labels},
        {"cells", std::move(cells)},
    });
  }
  return {
      {"units", "percent"},
      {"thresholds", report.thresholds},
      {"characteristics", std::move(entries)},
      {"pairwise", std::move(pairwise)},
      {"notices", report.notices},
  };
}

}  // namespace

nlohmann::ordered_json fn_report_to_json(const FNReport& report) { return fn_json(report); }

DiagnosisReport diagnose(const Dataset& dataset, std::span<const Prediction> predictions,
                         const DiagnosisOptions& options) {
  validate_config(options.config);
  DiagnosisReport report;
  report.subset = options.subset;
  report.resolved_normalization =
      resolve_normalization_constant(options.config, dataset);
  EvaluationConfig config = options.config;
  config.normalization_constant = report.resolved_normalization;
  report.config = config;

  const std::vector<Prediction> top_k =
      truncate_top_k(predictions, dataset, config.top_k_factor);
  EvaluationContext all_ctx(dataset, predictions);
  EvaluationContext top_ctx(dataset, top_k);
  report.metrics.standard_all = average_map(all_ctx, config, false);
  report.metrics.normalized_all = average_map(all_ctx, config, true);
  report.metrics.standard_top_k = average_map(top_ctx, config, false);
  report.metrics.normalized_top_k = average_map(top_ctx, config, true);

  report.fp_profile = build_fp_profile(dataset, predictions, config);
  report.impact = error_impact(dataset, predictions, config);

  bool any_characteristic = false;
  for (Characteristic c : kAllCharacteristics) {
    any_characteristic = any_characteristic || dataset.has_characteristic(c);
  }
  if (any_characteristic) {
    report.sensitivity = sensitivity_profile(dataset, predictions, config);
    report.false_negatives = false_negatives(dataset, predictions, config);
  } else {
    report.notices.push_back(
        "no characteristic data available; sensitivity and false-negative analyses skipped");
  }

  report.provenance.tool_version = std::string(kToolVersion);
  report.provenance.generated_at =
      options.timestamp_override ? *options.timestamp_override : current_timestamp_utc();
  return report;
}

nlohmann::ordered_json report_to_json(const DiagnosisReport& report) {
  ordered_json inputs = ordered_json::array();
  for (const auto& input : report.provenance.inputs) {
    inputs.push_back({{"role", input.role}, {"path", input.path}, {"fnv1a64", input.digest}});
  }
  ordered_json config = {
      {"tiou_thresholds", report.config.tiou_thresholds},
      {"normalization_constant", report.resolved_normalization},
      {"top_k_factor", report.config.top_k_factor},
      {"min_overlap_floor", report.config.min_overlap_floor},
  };
  if (report.subset) config["subset"] = *report.subset;

  ordered_json doc = {
      {"schema_version", kReportSchemaVersion},
      {"tool", {{"name", std::string(kToolName)},
                {"version", report.provenance.tool_version}}},
      {"generated_at", report.provenance.generated_at},
      {"inputs", std::move(inputs)},
      {"config", std::move(config)},
      {"metrics", metrics_json(report.metrics)},
      {"fp_profile", fp_profile_json(report.fp_profile)},
      {"error_impact", error_impact_json(report.impact)},
  };
  doc["sensitivity"] =
      report.sensitivity ? sensitivity_json(*report.sensitivity) : ordered_json(nullptr);
  doc["false_negatives"] =
      report.false_negatives ? fn_json(*report.false_negatives) : ordered_json(nullptr);
  doc["notices"] = report.notices;
  return doc;
}

namespace {

void dump_value(const ordered_json& value, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * static_cast<std::size_t>(depth),
                        ' ');
  const std::string pad_in(
      static_cast<std::size_t>(indent) * static_cast<std::size_t>(depth + 1), ' ');
  switch (value.type()) {
    case nlohmann::json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (const auto& [key, v] : value.items()) {
        out += pad_in;
        out += ordered_json(key).dump();
        out += ": ";
        dump_value(v, out, indent, depth + 1);
        if (++i < value.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        out += pad_in;
        dump_value(value[i], out, indent, depth + 1);
        if (i + 1 < value.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_fixed(value.get<double>());
      return;
    default:
      out += value.dump();
      return;
  }
}

}  // namespace

std::string dump_json_fixed(const nlohmann::ordered_json& value, int indent) {
  std::string out;
  dump_value(value, out, indent, 0);
  out += "\n";
  return out;
}

}  // namespace taldiag
