#include "vizcap/chart.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "vizcap/error.hpp"

namespace vizcap {

namespace {

std::string Num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

double NiceStep(double extent) {
  const double raw = extent / 5.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  const double residual = raw / magnitude;
  double nice = 10.0;
  if (residual <= 1.0) {
    nice = 1.0;
  } else if (residual <= 2.0) {
    nice = 2.0;
  } else if (residual <= 5.0) {
    nice = 5.0;
  }
  return nice * magnitude;
}

std::string TickLabel(double v, double step) {
  const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < step * 1e-9 ? 0.0 : v);
  return buf;
}

std::vector<double> Ticks(double lo, double hi) {
  std::vector<double> ticks;
  const double step = NiceStep(hi - lo);
  for (double k = std::ceil(lo / step); k * step <= hi + step * 1e-9; k += 1.0) ticks.push_back(k * step);
  return ticks;
}

}  // namespace

std::string XmlEscape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::pair<double, double> PaddedRange(double lo, double hi) {
  const double extent = hi - lo;
  if (extent <= 0.0) return {lo - 1.0, hi + 1.0};
  return {lo - kRangePadding * extent, hi + kRangePadding * extent};
}

const std::vector<std::string>& DefaultPalette() {
  static const std::vector<std::string> palette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                   "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return palette;
}

ChartSpec ChartSpecFor(const AnalysisDocument& doc) {
  ChartSpec spec;
  spec.title = doc.title;
  spec.x_label = doc.x_label;
  spec.y_label = doc.y_label;
  spec.points = doc.points.points;
  spec.point_labels = doc.points.labels;
  spec.analysis = doc.result;
  return spec;
}

RenderedChart RenderScatter(const ChartSpec& spec) {
  if (spec.width_px <= 0) throw Error(ErrorCode::kValidation, "plot width must be positive");
  if (spec.margin_px < 48) throw Error(ErrorCode::kValidation, "margin must leave room for title and axis labels (>= 48 px)");
  if (spec.palette.empty()) throw Error(ErrorCode::kValidation, "palette is empty");

  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  if (!spec.points.empty()) {
    x_min = x_max = spec.points.front().x;
    y_min = y_max = spec.points.front().y;
    for (const auto& p : spec.points) {
      x_min = std::min(x_min, p.x);
      x_max = std::max(x_max, p.x);
      y_min = std::min(y_min, p.y);
      y_max = std::max(y_max, p.y);
    }
  }
  const auto [x_lo, x_hi] = PaddedRange(x_min, x_max);
  const auto [y_lo, y_hi] = PaddedRange(y_min, y_max);

  RenderedChart chart;
  const double side = spec.width_px;
  const double margin = spec.margin_px;
  chart.plot_left = margin;
  chart.plot_top = margin;
  chart.plot_width = side;
  chart.plot_height = side;
  chart.x_map = {x_lo, x_hi, margin, margin + side};
  chart.y_map = {y_lo, y_hi, margin + side, margin};
  const double total = side + 2.0 * margin;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << Num(total) << "\" height=\""
      << Num(total) << "\" viewBox=\"0 0 " << Num(total) << ' ' << Num(total) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << Num(total) << "\" height=\"" << Num(total) << "\" fill=\"#ffffff\"/>\n";
  svg << "<defs><clipPath id=\"plot-clip\"><rect x=\"" << Num(margin) << "\" y=\"" << Num(margin) << "\" width=\""
      << Num(side) << "\" height=\"" << Num(side) << "\"/></clipPath></defs>\n";
  svg << "<text class=\"title\" x=\"" << Num(total / 2) << "\" y=\"" << Num(margin / 2) << "\" text-anchor=\"middle\""
      << " font-family=\"sans-serif\" font-size=\"16\">" << XmlEscape(spec.title) << "</text>\n";
  svg << "<rect class=\"plot-area\" x=\"" << Num(margin) << "\" y=\"" << Num(margin) << "\" width=\"" << Num(side)
      << "\" height=\"" << Num(side) << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#333333\">\n";
  const double x_step = NiceStep(x_hi - x_lo);
  for (const double t : Ticks(x_lo, x_hi)) {
    const double px = chart.x_map.ToPixel(t);
    svg << "<line x1=\"" << Num(px) << "\" y1=\"" << Num(margin + side) << "\" x2=\"" << Num(px) << "\" y2=\""
        << Num(margin + side + 5) << "\" stroke=\"#333333\"/>";
    svg << "<text x=\"" << Num(px) << "\" y=\"" << Num(margin + side + 17) << "\" text-anchor=\"middle\">"
        << TickLabel(t, x_step) << "</text>\n";
  }
  const double y_step = NiceStep(y_hi - y_lo);
  for (const double t : Ticks(y_lo, y_hi)) {
    const double py = chart.y_map.ToPixel(t);
    svg << "<line x1=\"" << Num(margin - 5) << "\" y1=\"" << Num(py) << "\" x2=\"" << Num(margin) << "\" y2=\""
        << Num(py) << "\" stroke=\"#333333\"/>";
    svg << "<text x=\"" << Num(margin - 8) << "\" y=\"" << Num(py + 3) << "\" text-anchor=\"end\">"
        << TickLabel(t, y_step) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text class=\"axis-label x-label\" x=\"" << Num(margin + side / 2) << "\" y=\"" << Num(total - margin / 4)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << XmlEscape(spec.x_label)
      << "</text>\n";
  svg << "<text class=\"axis-label y-label\" x=\"" << Num(margin / 4) << "\" y=\"" << Num(margin + side / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 "
      << Num(margin / 4) << ' ' << Num(margin + side / 2) << ")\">" << XmlEscape(spec.y_label) << "</text>\n";

  const RegressionResult* regression = nullptr;
  const ClusterResult* clusters = nullptr;
  if (spec.analysis) {
    regression = std::get_if<RegressionResult>(&*spec.analysis);
    clusters = std::get_if<ClusterResult>(&*spec.analysis);
  }
  if (clusters && clusters->labels.size() != spec.points.size()) {
    throw Error(ErrorCode::kValidation, "cluster labels do not match the number of points");
  }

  if (regression) {
    const double y0 = regression->intercept + regression->slope * x_lo;
    const double y1 = regression->intercept + regression->slope * x_hi;
    svg << "<line class=\"fit-line\" x1=\"" << Num(chart.x_map.ToPixel(x_lo)) << "\" y1=\""
        << Num(chart.y_map.ToPixel(y0)) << "\" x2=\"" << Num(chart.x_map.ToPixel(x_hi)) << "\" y2=\""
        << Num(chart.y_map.ToPixel(y1)) << "\" stroke=\"#d62728\" stroke-width=\"2\" clip-path=\"url(#plot-clip)\"/>\n";
  }

  svg << "<g class=\"markers\">\n";
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    std::string fill = spec.palette.front();
    if (clusters) {
      const int id = clusters->labels[i];
      fill = id < 0 ? kNoiseColor : spec.palette[static_cast<std::size_t>(id) % spec.palette.size()];
    }
    svg << "<circle class=\"marker\" cx=\"" << Num(chart.x_map.ToPixel(spec.points[i].x)) << "\" cy=\""
        << Num(chart.y_map.ToPixel(spec.points[i].y)) << "\" r=\"3.5\" fill=\"" << fill
        << "\" fill-opacity=\"0.8\"/>\n";
  }
  svg << "</g>\n";

  if (regression && !regression->confirmed.empty()) {
    svg << "<g class=\"outliers\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (const auto& c : regression->confirmed) {
      for (std::size_t i = 0; i < spec.points.size(); ++i) {
        const bool match = i < spec.point_labels.size() && spec.point_labels[i] == c.label;
        if (!match) continue;
        const double cx = chart.x_map.ToPixel(spec.points[i].x);
        const double cy = chart.y_map.ToPixel(spec.points[i].y);
        svg << "<circle class=\"outlier-ring\" cx=\"" << Num(cx) << "\" cy=\"" << Num(cy)
            << "\" r=\"8\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>";
        svg << "<text class=\"outlier-label\" x=\"" << Num(cx + 10) << "\" y=\"" << Num(cy - 10) << "\">"
            << XmlEscape(c.label) << "</text>\n";
        break;
      }
    }
    svg << "</g>\n";
  }

  if (clusters && clusters->n_clusters > 0) {
    svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"10\">\n";
    double ly = margin + 12;
    for (const auto& s : clusters->sizes_ranked) {
      const auto& color = spec.palette[static_cast<std::size_t>(s.cluster_id) % spec.palette.size()];
      svg << "<rect x=\"" << Num(margin + side + 8) << "\" y=\"" << Num(ly - 8) << "\" width=\"8\" height=\"8\" fill=\""
          << color << "\"/><text x=\"" << Num(margin + side + 20) << "\" y=\"" << Num(ly) << "\">" << s.size
          << "</text>\n";
      ly += 14;
    }
    if (!clusters->noise_indices.empty()) {
      svg << "<rect x=\"" << Num(margin + side + 8) << "\" y=\"" << Num(ly - 8) << "\" width=\"8\" height=\"8\" fill=\""
          << kNoiseColor << "\"/><text x=\"" << Num(margin + side + 20) << "\" y=\"" << Num(ly) << "\">noise</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  chart.svg = svg.str();
  return chart;
}

std::vector<BarSegment> StackedBarSegments(const EvalSummary& summary, double bar_area_height) {
  struct Bar {
    std::string quality;
    TierCounts counts;
  };
  std::vector<Bar> bars;
  const auto total = [](const TierCounts& c) { return c[0] + c[1] + c[2]; };
  if (total(summary.engagement) > 0) bars.push_back({"engagement", summary.engagement});
  for (std::size_t q = 0; q < kQualityCount; ++q) {
    const auto& top = summary.qualities[q].top;
    if (total(top) > 0) bars.push_back({std::string(ToString(static_cast<Quality>(q))), top});
  }
  if (bars.empty()) throw Error(ErrorCode::kEmptyChart, "evaluation summary has no counts to chart");
  std::size_t tallest = 0;
  for (const auto& b : bars) tallest = std::max(tallest, total(b.counts));
  std::vector<BarSegment> segments;
  for (const auto& b : bars) {
    for (std::size_t t = 0; t < kTierCount; ++t) {
      segments.push_back({b.quality, static_cast<CaptionTier>(t), b.counts[t],
                          bar_area_height * static_cast<double>(b.counts[t]) / static_cast<double>(tallest)});
    }
  }
  return segments;
}

std::string RenderStackedBars(const EvalSummary& summary) {
  constexpr double kBarArea = 300.0;
  constexpr double kBarWidth = 60.0;
  constexpr double kGap = 40.0;
  constexpr double kLeft = 60.0;
  constexpr double kTop = 50.0;
  static const char* kTierColors[kTierCount] = {"#9ecae1", "#4292c6", "#08519c"};

  const auto segments = StackedBarSegments(summary, kBarArea);
  const std::size_t n_bars = segments.size() / kTierCount;
  const double width = kLeft + n_bars * (kBarWidth + kGap) + 120.0;
  const double height = kTop + kBarArea + 60.0;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << Num(width) << "\" height=\""
      << Num(height) << "\" viewBox=\"0 0 " << Num(width) << ' ' << Num(height) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << Num(width) << "\" height=\"" << Num(height) << "\" fill=\"#ffffff\"/>\n";
  svg << "<text class=\"title\" x=\"" << Num(width / 2) << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"16\">Caption rankings by tier</text>\n";
  const double baseline = kTop + kBarArea;
  for (std::size_t b = 0; b < n_bars; ++b) {
    const double x = kLeft + b * (kBarWidth + kGap);
    double y = baseline;
    svg << "<g class=\"bar\" data-quality=\"" << segments[b * kTierCount].quality << "\">\n";
    for (std::size_t t = 0; t < kTierCount; ++t) {
      const auto& seg = segments[b * kTierCount + t];
      y -= seg.height;
      svg << "<rect class=\"segment\" data-tier=\"" << ToString(seg.tier) << "\" data-count=\"" << seg.count
          << "\" x=\"" << Num(x) << "\" y=\"" << Num(y) << "\" width=\"" << Num(kBarWidth) << "\" height=\""
          << Num(seg.height) << "\" fill=\"" << kTierColors[t] << "\"/>\n";
    }
    svg << "<text x=\"" << Num(x + kBarWidth / 2) << "\" y=\"" << Num(baseline + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << segments[b * kTierCount].quality
        << "</text>\n</g>\n";
  }
  svg << "<line x1=\"" << Num(kLeft - 10) << "\" y1=\"" << Num(baseline) << "\" x2=\""
      << Num(kLeft + n_bars * (kBarWidth + kGap) - kGap + 10) << "\" y2=\"" << Num(baseline)
      << "\" stroke=\"#333333\"/>\n";
  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t t = 0; t < kTierCount; ++t) {
    const double lx = width - 100.0;
    const double ly = kTop + 16.0 * static_cast<double>(t);
    svg << "<rect x=\"" << Num(lx) << "\" y=\"" << Num(ly) << "\" width=\"10\" height=\"10\" fill=\"" << kTierColors[t]
        << "\"/><text x=\"" << Num(lx + 14) << "\" y=\"" << Num(ly + 9) << "\">Tier " << (t + 1) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace vizcap
