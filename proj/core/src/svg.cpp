#include "taldiag/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "taldiag/report.hpp"

namespace taldiag {

namespace {

// Category palette, kCategoryCount order (TP, DD, WL, LOC, CON, BG).
constexpr const char* kCategoryColor[kCategoryCount] = {
    "#4daf4a", "#ff7f00", "#984ea3", "#f781bf", "#a65628", "#999999",
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct SvgBuilder {
  std::string body;
  double width = 0.0;
  double height = 0.0;

  SvgBuilder(double w, double h) : width(w), height(h) {}

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& extra = "") {
    body += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
            "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"" + extra + "/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            bool dashed = false) {
    body += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
            "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"1\"";
    if (dashed) body += " stroke-dasharray=\"6,3\"";
    body += "/>\n";
  }
  void text(double x, double y, const std::string& s, int size = 11,
            const std::string& anchor = "middle", const std::string& extra = "") {
    body += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
            std::to_string(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
            "\"" + extra + ">" + xml_escape(s) + "</text>\n";
  }
  std::string finish(const std::string& title) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                      "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
                      num(height) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
           "\" fill=\"white\"/>\n";
    out += "<title>" + xml_escape(title) + "</title>\n";
    out += body;
    out += "</svg>\n";
    return out;
  }
};

// data-value carries the exact percent figure the JSON report holds.
std::string data_value(double fraction) {
  return " data-value=\"" + format_fixed(fraction * 100.0) + "\"";
}

void category_legend(SvgBuilder& svg, double x, double y) {
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    const double cy = y + 16.0 * static_cast<double>(c);
    svg.rect(x, cy, 10, 10, kCategoryColor[c]);
    svg.text(x + 16, cy + 9, std::string(short_code(static_cast<ErrorCategory>(c))), 11,
             "start");
  }
}

}  // namespace

std::string fp_profile_svg(const FPProfile& profile) {
  const double w = 760, h = 360, left = 60, bottom = 40, top = 40, right = 90;
  SvgBuilder svg(w, h);
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;
  const double band = plot_w / static_cast<double>(profile.splits.size());

  svg.text(w / 2, 20, "False positive profile (mean across tIoU thresholds)", 13);
  for (int tick = 0; tick <= 4; ++tick) {
    const double frac = tick / 4.0;
    const double y = top + plot_h * (1.0 - frac);
    svg.line(left - 4, y, left, y, "#333333");
    svg.text(left - 8, y + 4, num(frac * 100.0), 10, "end");
  }
  svg.line(left, top, left, top + plot_h, "#333333");
  svg.line(left, top + plot_h, left + plot_w, top + plot_h, "#333333");

  for (std::size_t s = 0; s < profile.splits.size(); ++s) {
    const auto& split = profile.splits[s];
    const double x = left + band * static_cast<double>(s) + band * 0.125;
    double y = top + plot_h;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      const double segment = plot_h * split.mean[c];
      if (segment <= 0.0) continue;
      y -= segment;
      svg.rect(x, y, band * 0.75, segment, kCategoryColor[c],
               " data-split=\"" + std::to_string(s + 1) + "\" data-category=\"" +
                   std::string(short_code(static_cast<ErrorCategory>(c))) + "\"" +
                   data_value(split.mean[c]));
    }
    svg.text(x + band * 0.375, top + plot_h + 14, std::to_string(s + 1), 10);
  }
  svg.text(left + plot_w / 2, h - 8, "score-ranked split (top-" +
                                         std::to_string(profile.top_k_factor) + "G)", 11);
  svg.text(16, top + plot_h / 2, "breakdown (%)", 11, "middle",
           " transform=\"rotate(-90 16 " + num(top + plot_h / 2) + ")\"");
  category_legend(svg, w - right + 16, top);
  return svg.finish("false positive profile");
}

std::string error_impact_svg(const ErrorImpact& impact) {
  const double w = 560, h = 320, left = 70, bottom = 40, top = 48, right = 20;
  SvgBuilder svg(w, h);
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;

  double max_delta = 0.0;
  for (const auto& entry : impact.categories) max_delta = std::max(max_delta, entry.delta);
  const double scale = max_delta > 0.0 ? plot_h / (max_delta * 1.15) : 0.0;

  svg.text(w / 2, 18, "Average-mAP_N gain from removing each error type", 13);
  svg.text(w / 2, 34,
           "baseline " + format_fixed(impact.baseline * 100.0) + "%", 11);
  svg.line(left, top + plot_h, left + plot_w, top + plot_h, "#333333");
  svg.line(left, top, left, top + plot_h, "#333333");

  const double band = plot_w / static_cast<double>(impact.categories.size());
  for (std::size_t k = 0; k < impact.categories.size(); ++k) {
    const auto& entry = impact.categories[k];
    const double bar_h = entry.delta * scale;
    const double x = left + band * static_cast<double>(k) + band * 0.2;
    const auto color =
        kCategoryColor[static_cast<std::size_t>(entry.category)];
    svg.rect(x, top + plot_h - bar_h, band * 0.6, bar_h, color,
             " data-category=\"" + std::string(short_code(entry.category)) + "\"" +
                 data_value(entry.delta));
    svg.text(x + band * 0.3, top + plot_h - bar_h - 4, num(entry.delta * 100.0), 10);
    svg.text(x + band * 0.3, top + plot_h + 14, std::string(short_code(entry.category)), 11);
  }
  svg.text(16, top + plot_h / 2, "gain (%)", 11, "middle",
           " transform=\"rotate(-90 16 " + num(top + plot_h / 2) + ")\"");
  return svg.finish("error impact");
}

namespace {

struct BucketDatum {
  std::string group;
  std::string label;
  std::optional<double> value;  // fraction
  int instances = 0;
};

std::string grouped_bars(const std::string& title, const std::string& y_label,
                         const std::vector<BucketDatum>& data,
                         std::optional<double> overall, const std::string& datum_kind) {
  const double w = 980, h = 380, left = 64, bottom = 64, top = 46, right = 20;
  SvgBuilder svg(w, h);
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;

  double max_v = overall.value_or(0.0);
  for (const auto& d : data) max_v = std::max(max_v, d.value.value_or(0.0));
  if (max_v <= 0.0) max_v = 1.0;
  const double scale = plot_h / (max_v * 1.1);

  svg.text(w / 2, 20, title, 13);
  svg.line(left, top + plot_h, left + plot_w, top + plot_h, "#333333");
  svg.line(left, top, left, top + plot_h, "#333333");
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = max_v * 1.1 * tick / 4.0;
    const double y = top + plot_h - v * scale;
    svg.line(left - 4, y, left, y, "#333333");
    svg.text(left - 8, y + 4, num(v * 100.0), 10, "end");
  }

  const double band = plot_w / static_cast<double>(data.size());
  std::string prev_group;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& d = data[i];
    const double x = left + band * static_cast<double>(i);
    if (d.group != prev_group) {
      if (!prev_group.empty()) svg.line(x, top, x, top + plot_h, "#dddddd");
      svg.text(x + 4, h - 16, d.group, 11, "start");
      prev_group = d.group;
    }
    if (d.value) {
      const double bar_h = *d.value * scale;
      svg.rect(x + band * 0.15, top + plot_h - bar_h, band * 0.7, bar_h, "#377eb8",
               " data-" + datum_kind + "=\"" + d.group + "/" + d.label + "\"" +
                   data_value(*d.value));
    } else {
      svg.text(x + band * 0.5, top + plot_h - 6, "n/a", 9);
    }
    svg.text(x + band * 0.5, top + plot_h + 13, d.label, 9);
  }
  if (overall) {
    const double y = top + plot_h - *overall * scale;
    svg.line(left, y, left + plot_w, y, "#e41a1c", /*dashed=*/true);
    svg.text(left + plot_w, y - 4, "overall " + num(*overall * 100.0), 10, "end");
  }
  svg.text(16, top + plot_h / 2, y_label, 11, "middle",
           " transform=\"rotate(-90 16 " + num(top + plot_h / 2) + ")\"");
  return svg.finish(title);
}

}  // namespace

std::string sensitivity_svg(const SensitivityProfile& profile) {
  std::vector<BucketDatum> data;
  for (const auto& entry : profile.entries) {
    for (const auto& bucket : entry.buckets) {
      data.push_back({std::string(to_string(entry.characteristic)), bucket.label,
                      bucket.average_map_n, bucket.instance_count});
    }
  }
  return grouped_bars("Average-mAP_N per characteristic bucket", "average-mAP_N (%)", data,
                      profile.overall, "bucket");
}

std::string sensitivity_summary_svg(const SensitivityProfile& profile) {
  const double w = 460, h = 320, left = 110, bottom = 30, top = 46, right = 24;
  SvgBuilder svg(w, h);
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;

  double max_v = profile.overall;
  for (const auto& entry : profile.entries) {
    max_v = std::max(max_v, profile.overall + entry.impact);
  }
  if (max_v <= 0.0) max_v = 1.0;
  const double scale = plot_w / (max_v * 1.1);

  svg.text(w / 2, 20, "Sensitivity profile", 13);
  const double band = plot_h / static_cast<double>(std::max<std::size_t>(
                                   1, profile.entries.size()));
  for (std::size_t i = 0; i < profile.entries.size(); ++i) {
    const auto& entry = profile.entries[i];
    const double hi = profile.overall + entry.impact;       // max bucket
    const double lo = hi - entry.sensitivity;               // min bucket
    const double y = top + band * static_cast<double>(i) + band * 0.25;
    svg.rect(left + lo * scale, y, std::max(1.0, (hi - lo) * scale), band * 0.5, "#377eb8",
             " data-characteristic=\"" + std::string(to_string(entry.characteristic)) +
                 "\" data-sensitivity=\"" + format_fixed(entry.sensitivity * 100.0) +
                 "\" data-impact=\"" + format_fixed(entry.impact * 100.0) + "\"");
    svg.text(left - 6, y + band * 0.25 + 4, std::string(to_string(entry.characteristic)), 10,
             "end");
  }
  const double overall_x = left + profile.overall * scale;
  svg.line(overall_x, top, overall_x, top + plot_h, "#e41a1c", /*dashed=*/true);
  svg.text(overall_x, top + plot_h + 14, "overall " + num(profile.overall * 100.0), 10);
  return svg.finish("sensitivity profile");
}

std::string fn_rates_svg(const FNReport& report) {
  std::vector<BucketDatum> data;
  for (const auto& entry : report.entries) {
    for (const auto& bucket : entry.buckets) {
      std::optional<double> value;
      if (bucket.instance_count > 0) value = bucket.mean_rate;
      data.push_back({std::string(to_string(entry.characteristic)), bucket.label, value,
                      bucket.instance_count});
    }
  }
  return grouped_bars("False negative rate per characteristic bucket (mean across thresholds)",
                      "miss rate (%)", data, std::nullopt, "bucket");
}

std::string fn_pairwise_svg(const FNReport::Pairwise& pair) {
  const double cell = 52.0, left = 90, top = 70, legend = 28;
  const double w = left + cell * static_cast<double>(pair.col_labels.size()) + 24;
  const double h = top + cell * static_cast<double>(pair.row_labels.size()) + legend;
  SvgBuilder svg(w, h);
  svg.text(w / 2, 20, std::string(to_string(pair.rows)) + " x " +
                          std::string(to_string(pair.cols)) + " miss rate (%)", 13);
  for (std::size_t c = 0; c < pair.col_labels.size(); ++c) {
    svg.text(left + cell * (static_cast<double>(c) + 0.5), top - 10, pair.col_labels[c], 10);
  }
  for (std::size_t r = 0; r < pair.row_labels.size(); ++r) {
    svg.text(left - 8, top + cell * (static_cast<double>(r) + 0.55), pair.row_labels[r], 10,
             "end");
    for (std::size_t c = 0; c < pair.col_labels.size(); ++c) {
      const auto& value = pair.cells[r][c];
      const double x = left + cell * static_cast<double>(c);
      const double y = top + cell * static_cast<double>(r);
      if (value.mean_rate) {
        const int red = 255;
        const int gb = static_cast<int>(std::lround(235.0 * (1.0 - *value.mean_rate)));
        char color[12];
        std::snprintf(color, sizeof(color), "#%02x%02x%02x", red, gb, gb);
        svg.rect(x, y, cell - 2, cell - 2, color,
                 " data-row=\"" + pair.row_labels[r] + "\" data-col=\"" + pair.col_labels[c] +
                     "\"" + data_value(*value.mean_rate));
        svg.text(x + (cell - 2) / 2, y + cell / 2 + 4, num(*value.mean_rate * 100.0), 10);
      } else {
        svg.rect(x, y, cell - 2, cell - 2, "#f2f2f2");
        svg.text(x + (cell - 2) / 2, y + cell / 2 + 4, "-", 10);
      }
    }
  }
  return svg.finish("pairwise miss rates");
}

}  // namespace taldiag
