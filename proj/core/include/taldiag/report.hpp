#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taldiag/analysis.hpp"
#include "taldiag/config.hpp"
#include "taldiag/dataset.hpp"
#include "taldiag/diagnosis.hpp"
#include "taldiag/metrics.hpp"

namespace taldiag {

inline constexpr std::string_view kToolName = "taldiag";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct Provenance {
  struct Input {
    std::string role;    // "ground_truth" / "predictions" / "characteristics"
    std::string path;
    std::string digest;  // fnv1a64 of the file bytes, hex
  };
  std::vector<Input> inputs;
  std::string tool_version;
  std::string generated_at;  // ISO-8601 UTC
};

/// FNV-1a 64-bit digest, as 16 hex digits.
std::string fnv1a64_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

/// UTC timestamp for report provenance. Honors SOURCE_DATE_EPOCH so runs can
/// be made byte-reproducible.
std::string current_timestamp_utc();

struct OverallMetrics {
  EvalResult standard_all;
  EvalResult normalized_all;
  EvalResult standard_top_k;
  EvalResult normalized_top_k;
};

struct DiagnosisReport {
  EvaluationConfig config;
  double resolved_normalization = 0.0;
  std::optional<std::string> subset;
  OverallMetrics metrics;
  FPProfile fp_profile;
  ErrorImpact impact;
  std::optional<SensitivityProfile> sensitivity;
  std::optional<FNReport> false_negatives;
  std::vector<std::string> notices;
  Provenance provenance;
};

struct DiagnosisOptions {
  EvaluationConfig config;
  std::optional<std::string> subset;              // echoed into the report
  std::optional<std::string> timestamp_override;  // fixed provenance timestamp
};

/// Runs the full pipeline on in-memory inputs: overall metrics (all and
/// top-kG), FP profile, error impact, and, when characteristic data exists,
/// sensitivity and false-negative analyses.
DiagnosisReport diagnose(const Dataset& dataset, std::span<const Prediction> predictions,
                         const DiagnosisOptions& options);

/// JSON form of the report. All rates and metric values are percentages.
nlohmann::ordered_json report_to_json(const DiagnosisReport& report);

/// JSON form of one FN report (used standalone for the across-method view).
nlohmann::ordered_json fn_report_to_json(const FNReport& report);

/// Serializes with fixed 6-decimal floats and stable ordering, so equal
/// reports are byte-equal.
std::string dump_json_fixed(const nlohmann::ordered_json& value, int indent = 2);

/// Formats one value the way reports do ("%.6f").
std::string format_fixed(double value);

}  // namespace taldiag
