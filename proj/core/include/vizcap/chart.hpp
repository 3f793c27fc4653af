#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vizcap/analysis.hpp"
#include "vizcap/study.hpp"

namespace vizcap {

// Linear map between a (padded) data interval and a pixel interval. For the
// y axis px_lo is the bottom edge, so pixels grow downward as data decreases.
struct AxisMap {
  double data_lo = 0.0;
  double data_hi = 1.0;
  double px_lo = 0.0;
  double px_hi = 1.0;

  double ToPixel(double v) const { return px_lo + (v - data_lo) / (data_hi - data_lo) * (px_hi - px_lo); }
  double ToData(double px) const { return data_lo + (px - px_lo) / (px_hi - px_lo) * (data_hi - data_lo); }
};

inline constexpr double kRangePadding = 0.05;

// [lo - 5% extent, hi + 5% extent]; a zero extent pads by 1 on each side.
std::pair<double, double> PaddedRange(double lo, double hi);

const std::vector<std::string>& DefaultPalette();
inline constexpr const char* kNoiseColor = "#9e9e9e";

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Point> points;
  std::vector<std::string> point_labels;
  std::optional<std::variant<RegressionResult, ClusterResult>> analysis;
  int width_px = 480;   // side of the square plot area
  int margin_px = 72;
  std::vector<std::string> palette = DefaultPalette();
};

ChartSpec ChartSpecFor(const AnalysisDocument& doc);

struct RenderedChart {
  std::string svg;
  AxisMap x_map;
  AxisMap y_map;
  double plot_left = 0.0;
  double plot_top = 0.0;
  double plot_width = 0.0;
  double plot_height = 0.0;
};

// Square scatter plot with either a clipped regression line plus rings on the
// confirmed outliers, or cluster colouring with grey noise. Output is a pure
// function of the spec.
RenderedChart RenderScatter(const ChartSpec& spec);

struct BarSegment {
  std::string quality;  // "engagement", "relevance", ...
  CaptionTier tier = CaptionTier::kT1;
  std::size_t count = 0;
  double height = 0.0;  // in pixels, proportional to count
};

// Bars for engagement (votes) and each quality (top-rank counts) that has any
// count; all-zero input is Error(kEmptyChart).
std::vector<BarSegment> StackedBarSegments(const EvalSummary& summary, double bar_area_height);
std::string RenderStackedBars(const EvalSummary& summary);

std::string XmlEscape(std::string_view text);

}  // namespace vizcap
