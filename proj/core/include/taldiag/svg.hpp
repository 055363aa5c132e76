#pragma once

#include <string>

#include "taldiag/analysis.hpp"
#include "taldiag/diagnosis.hpp"

namespace taldiag {

// Hand-emitted SVG charts. Every plotted datum carries a data-value
// attribute holding the exact value (percent, 6 decimals) the JSON report
// serializes, so charts stay a view of the report, never a recomputation.

/// Stacked bars: category breakdown per score-ranked split (mean across
/// thresholds).
std::string fp_profile_svg(const FPProfile& profile);

/// Bars: average-mAP_N delta from removing each error category.
std::string error_impact_svg(const ErrorImpact& impact);

/// Grouped bars: per-bucket average-mAP_N with the overall value as a
/// dashed line.
std::string sensitivity_svg(const SensitivityProfile& profile);

/// Floating bars from min to max bucket score per characteristic.
std::string sensitivity_summary_svg(const SensitivityProfile& profile);

/// Grouped bars: mean miss rate per characteristic bucket.
std::string fn_rates_svg(const FNReport& report);

/// Heat grid of one pairwise miss-rate matrix.
std::string fn_pairwise_svg(const FNReport::Pairwise& pair);

}  // namespace taldiag
