#include "taldiag/csv.hpp"

#include <fstream>

#include "taldiag/diagnosis.hpp"
#include "taldiag/report.hpp"

namespace taldiag {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_verdicts_csv(const std::filesystem::path& path, const EvaluationContext& context,
                        const VerdictTable& verdicts) {
  std::ofstream out = open_csv(path);
  out << "prediction_id,video_id,label,score,threshold,category,reference_instance,tiou\n";
  const auto predictions = context.predictions();
  std::string line;
  for (std::size_t t = 0; t < verdicts.thresholds.size(); ++t) {
    for (std::size_t p = 0; p < predictions.size(); ++p) {
      const Prediction& pred = predictions[p];
      const ReferenceMatch& ref = context.reference(p);
      line.clear();
      line += std::to_string(pred.prediction_id);
      line += ',';
      line += csv_escape(pred.video_id);
      line += ',';
      line += csv_escape(pred.label);
      line += ',';
      line += format_fixed(pred.score);
      line += ',';
      line += format_fixed(verdicts.thresholds[t]);
      line += ',';
      line += short_code(verdicts.categories[t][p]);
      line += ',';
      if (ref.instance) line += std::to_string(*ref.instance);
      line += ',';
      line += format_fixed(ref.tiou);
      line += '\n';
      out << line;
    }
  }
}

void write_fp_profile_csv(const std::filesystem::path& path, const FPProfile& profile) {
  std::ofstream out = open_csv(path);
  out << "threshold,split,size";
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    out << ',' << short_code(static_cast<ErrorCategory>(c));
  }
  out << '\n';
  auto row = [&out](const std::string& threshold, std::size_t split,
                    const FPProfile::Split& s, const std::array<double, kCategoryCount>& f) {
    out << threshold << ',' << (split + 1) << ',' << s.size;
    for (double v : f) out << ',' << format_fixed(v * 100.0);
    out << '\n';
  };
  for (std::size_t s = 0; s < profile.splits.size(); ++s) {
    row("mean", s, profile.splits[s], profile.splits[s].mean);
  }
  for (std::size_t t = 0; t < profile.thresholds.size(); ++t) {
    for (std::size_t s = 0; s < profile.splits.size(); ++s) {
      row(format_fixed(profile.thresholds[t]), s, profile.splits[s],
          profile.splits[s].per_threshold[t]);
    }
  }
}

void write_error_impact_csv(const std::filesystem::path& path, const ErrorImpact& impact) {
  std::ofstream out = open_csv(path);
  out << "category,baseline_average_map_normalized,average_map_normalized_after,delta\n";
  for (const auto& entry : impact.categories) {
    out << short_code(entry.category) << ',' << format_fixed(impact.baseline * 100.0) << ','
        << format_fixed(entry.after_removal * 100.0) << ',' << format_fixed(entry.delta * 100.0)
        << '\n';
  }
}

void write_sensitivity_csv(const std::filesystem::path& path,
                           const SensitivityProfile& profile) {
  std::ofstream out = open_csv(path);
  out << "characteristic,bucket,instances,average_map_normalized\n";
  for (const auto& entry : profile.entries) {
    for (const auto& bucket : entry.buckets) {
      out << to_string(entry.characteristic) << ',' << csv_escape(bucket.label) << ','
          << bucket.instance_count << ',';
      if (bucket.average_map_n) out << format_fixed(*bucket.average_map_n * 100.0);
      out << '\n';
    }
  }
}

void write_sensitivity_summary_csv(const std::filesystem::path& path,
                                   const SensitivityProfile& profile) {
  std::ofstream out = open_csv(path);
  out << "characteristic,overall_average_map_normalized,sensitivity,impact\n";
  for (const auto& entry : profile.entries) {
    out << to_string(entry.characteristic) << ',' << format_fixed(profile.overall * 100.0)
        << ',' << format_fixed(entry.sensitivity * 100.0) << ','
        << format_fixed(entry.impact * 100.0) << '\n';
  }
}

void write_fn_rates_csv(const std::filesystem::path& path, const FNReport& report) {
  std::ofstream out = open_csv(path);
  out << "characteristic,bucket,instances,mean_rate";
  for (double t : report.thresholds) out << ",rate@" << format_fixed(t);
  out << '\n';
  for (const auto& entry : report.entries) {
    for (const auto& bucket : entry.buckets) {
      out << to_string(entry.characteristic) << ',' << csv_escape(bucket.label) << ','
          << bucket.instance_count << ',';
      if (bucket.instance_count > 0) out << format_fixed(bucket.mean_rate * 100.0);
      for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
        out << ',';
        if (bucket.instance_count > 0 && t < bucket.rate_per_threshold.size()) {
          out << format_fixed(bucket.rate_per_threshold[t] * 100.0);
        }
      }
      out << '\n';
    }
  }
}

void write_fn_pairwise_csv(const std::filesystem::path& path,
                           const FNReport::Pairwise& pair) {
  std::ofstream out = open_csv(path);
  out << to_string(pair.rows) << "\\" << to_string(pair.cols);
  for (const auto& col : pair.col_labels) out << ',' << csv_escape(col);
  out << '\n';
  for (std::size_t r = 0; r < pair.row_labels.size(); ++r) {
    out << csv_escape(pair.row_labels[r]);
    for (std::size_t c = 0; c < pair.col_labels.size(); ++c) {
      out << ',';
      if (pair.cells[r][c].mean_rate) out << format_fixed(*pair.cells[r][c].mean_rate * 100.0);
    }
    out << '\n';
  }
}

}  // namespace taldiag
