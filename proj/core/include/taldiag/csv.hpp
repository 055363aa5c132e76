#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "taldiag/analysis.hpp"
#include "taldiag/diagnosis.hpp"
#include "taldiag/matching.hpp"

namespace taldiag {

/// Minimal CSV escaping: quotes a field only when it contains a comma,
/// quote or newline.
std::string csv_escape(const std::string& field);

/// Per-prediction verdict table: one row per (prediction, threshold).
/// Columns: prediction_id, video_id, label, score, threshold, category,
/// reference_instance, tiou.
void write_verdicts_csv(const std::filesystem::path& path, const EvaluationContext& context,
                        const VerdictTable& verdicts);

/// Per-split category fractions, one row per (threshold | "mean", split).
void write_fp_profile_csv(const std::filesystem::path& path, const FPProfile& profile);

/// Baseline, after-removal and delta average-mAP_N per category.
void write_error_impact_csv(const std::filesystem::path& path, const ErrorImpact& impact);

/// Per-bucket average-mAP_N rows plus per-characteristic summary rows.
void write_sensitivity_csv(const std::filesystem::path& path, const SensitivityProfile& profile);
void write_sensitivity_summary_csv(const std::filesystem::path& path,
                                   const SensitivityProfile& profile);

/// Per-bucket miss rates (mean and per threshold).
void write_fn_rates_csv(const std::filesystem::path& path, const FNReport& report);

/// One pairwise rate grid, row/column bucket labels included.
void write_fn_pairwise_csv(const std::filesystem::path& path, const FNReport::Pairwise& pair);

}  // namespace taldiag
