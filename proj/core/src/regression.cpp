#include <algorithm>
#include <cmath>
#include <limits>

#include "vizcap/analysis.hpp"
#include "vizcap/error.hpp"

namespace vizcap {

namespace {

struct Moments {
  double n = 0.0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

// Two-pass centred sums.
Moments ComputeMoments(std::span<const Point> points) {
  Moments m;
  m.n = static_cast<double>(points.size());
  for (const auto& p : points) {
    m.mean_x += p.x;
    m.mean_y += p.y;
  }
  m.mean_x /= m.n;
  m.mean_y /= m.n;
  for (const auto& p : points) {
    const double dx = p.x - m.mean_x;
    const double dy = p.y - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

// Squared quantities below this fraction of Syy are treated as exact zeros.
constexpr double kZeroSquaredTolerance = 1e-14;

}  // namespace

RegressionResult FitLinearRegression(std::span<const Point> points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::kInsufficientData,
                "linear regression needs at least 3 points, got " + std::to_string(points.size()));
  }
  const Moments m = ComputeMoments(points);
  if (m.sxx == 0.0) {
    throw Error(ErrorCode::kDegenerateFit, "x is constant; slope is undefined");
  }
  if (m.syy == 0.0) {
    throw Error(ErrorCode::kDegenerateCorrelation, "y is constant; correlation is undefined");
  }
  RegressionResult result;
  result.slope = m.sxy / m.sxx;
  result.intercept = m.mean_y - result.slope * m.mean_x;
  result.pearson_r = std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
  return result;
}

std::vector<double> StudentizedResiduals(std::span<const Point> points, const RegressionResult& fit) {
  const std::size_t n = points.size();
  if (n < 4) {
    throw Error(ErrorCode::kInsufficientData,
                "studentized residuals need at least 4 points, got " + std::to_string(n));
  }
  const Moments m = ComputeMoments(points);
  if (m.sxx == 0.0) {
    throw Error(ErrorCode::kDegenerateFit, "x is constant; slope is undefined");
  }
  std::vector<double> residuals(n);
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    residuals[i] = points[i].y - (fit.intercept + fit.slope * points[i].x);
    sse += residuals[i] * residuals[i];
  }
  const double zero_sq = kZeroSquaredTolerance * std::max(m.syy, std::numeric_limits<double>::min());
  const double dof = static_cast<double>(n) - 3.0;

  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = residuals[i];
    const double dx = points[i].x - m.mean_x;
    const double leverage = 1.0 / m.n + dx * dx / m.sxx;
    const double one_minus_h = 1.0 - leverage;
    const bool e_is_zero = e * e <= zero_sq;
    if (one_minus_h <= 1e-12) {
      // Removing the point leaves x constant; the point is fitted exactly.
      t[i] = 0.0;
      continue;
    }
    const double sse_deleted = sse - e * e / one_minus_h;
    if (sse_deleted <= zero_sq) {
      t[i] = e_is_zero ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), e);
      continue;
    }
    const double s_deleted = std::sqrt(sse_deleted / dof);
    t[i] = e / (s_deleted * std::sqrt(one_minus_h));
  }
  return t;
}

std::vector<OutlierCandidate> DetectRegressionOutliers(const PointSet& points, const RegressionResult& fit,
                                                       double threshold) {
  const auto t = StudentizedResiduals(points.points, fit);
  std::vector<OutlierCandidate> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::isinf(t[i]) || std::abs(t[i]) > threshold) {
      const double residual = points.points[i].y - (fit.intercept + fit.slope * points.points[i].x);
      out.push_back({points.rows[i], points.labels[i], t[i],
                     residual < 0.0 ? Direction::kLower : Direction::kHigher});
    }
  }
  return out;
}

RegressionResult ConfirmOutliers(RegressionResult result, std::span<const std::size_t> accepted_rows) {
  for (const auto row : accepted_rows) {
    const bool known = std::any_of(result.candidates.begin(), result.candidates.end(),
                                   [row](const OutlierCandidate& c) { return c.row_index == row; });
    if (!known) {
      throw Error(ErrorCode::kValidation, "row " + std::to_string(row) + " is not an outlier candidate");
    }
  }
  result.confirmed.clear();
  for (const auto& c : result.candidates) {
    if (std::find(accepted_rows.begin(), accepted_rows.end(), c.row_index) != accepted_rows.end()) {
      result.confirmed.push_back(c);
    }
  }
  return result;
}

AnalysisDocument AnalyzeRegression(const AxisSelection& selection, const RegressionOptions& options) {
  AnalysisDocument doc;
  doc.source = selection.table->source_name();
  doc.title = selection.title;
  doc.x_label = selection.x;
  doc.y_label = selection.y;
  doc.label_column = selection.label;
  doc.other_columns = OtherColumns(selection);
  doc.x_range = ColumnRange(selection, Axis::kX);
  doc.y_range = ColumnRange(selection, Axis::kY);
  doc.points = CollectPoints(selection);

  RegressionResult fit = FitLinearRegression(doc.points.points);
  fit.threshold = options.threshold;
  if (doc.points.size() >= 4) {
    fit.candidates = DetectRegressionOutliers(doc.points, fit, options.threshold);
  }
  doc.result = std::move(fit);
  return doc;
}

}  // namespace vizcap
