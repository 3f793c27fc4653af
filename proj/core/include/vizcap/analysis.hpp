#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vizcap/dataset.hpp"

namespace vizcap {

// ---------------------------------------------------------------------------
// Regression

enum class Direction { kLower, kHigher };

struct OutlierCandidate {
  std::size_t row_index = 0;
  std::string label;
  double t_value = 0.0;  // externally studentized residual, may be +-inf
  Direction direction = Direction::kLower;

  friend bool operator==(const OutlierCandidate&, const OutlierCandidate&) = default;
};

struct RegressionResult {
  double intercept = 0.0;
  double slope = 0.0;
  double pearson_r = 0.0;
  double threshold = 3.0;
  std::vector<OutlierCandidate> candidates;
  std::vector<OutlierCandidate> confirmed;  // subset of candidates, candidate order
};

inline constexpr double kDefaultOutlierThreshold = 3.0;

// Ordinary least squares y = intercept + slope * x with the sample Pearson
// coefficient. Requires >= 3 points; constant x is a degenerate fit and
// constant y a degenerate correlation.
RegressionResult FitLinearRegression(std::span<const Point> points);

// Deleted (externally studentized) residuals
//   t_i = e_i / (s_(i) * sqrt(1 - h_ii)),  h_ii = 1/n + (x_i - mean_x)^2 / Sxx
// where s_(i) is the residual standard error with point i left out. A zero
// leave-one-out error yields +-inf (or 0 when e_i is also zero). n >= 4.
std::vector<double> StudentizedResiduals(std::span<const Point> points, const RegressionResult& fit);

// Candidates with |t| > threshold, in point order.
std::vector<OutlierCandidate> DetectRegressionOutliers(const PointSet& points, const RegressionResult& fit,
                                                       double threshold = kDefaultOutlierThreshold);

// Keeps the accepted candidates (by row_index) as the confirmed set. An index
// that is not a candidate is a validation error.
RegressionResult ConfirmOutliers(RegressionResult result, std::span<const std::size_t> accepted_rows);

// ---------------------------------------------------------------------------
// Clustering

enum class FeatureScale { kZScore, kNone };

struct ClusterParams {
  double eps = 0.5;
  int min_pts = 4;
  FeatureScale scale = FeatureScale::kZScore;
};

inline constexpr int kNoise = -1;

struct ClusterSize {
  int cluster_id = 0;
  std::size_t size = 0;
  friend bool operator==(const ClusterSize&, const ClusterSize&) = default;
};

struct ClusterDescription {
  int cluster_id = 0;
  std::string text;
  friend bool operator==(const ClusterDescription&, const ClusterDescription&) = default;
};

struct ClusterResult {
  ClusterParams params;
  int n_clusters = 0;
  std::vector<ClusterSize> sizes_ranked;          // size desc, id asc on ties
  std::vector<ClusterDescription> descriptions;   // same order as sizes_ranked
  std::vector<std::size_t> noise_indices;         // positions in the point list
  std::string entity_noun = "points";
  std::vector<int> labels;                        // per point, kNoise for noise

  const std::string& description(int cluster_id) const;
};

// kZScore: per-axis (v - mean) / sample std. A zero-variance axis or fewer
// than two points is a scaling error. kNone returns the input.
std::vector<Point> ScaleFeatures(std::span<const Point> points, FeatureScale scale);

// DBSCAN over Euclidean distance (neighbourhood includes the point itself,
// distance <= eps). Cluster ids are assigned in discovery order while walking
// rows in ascending order; border points go to the first cluster reaching them.
std::vector<int> RunDbscan(std::span<const Point> points, double eps, int min_pts);

// Sorted k-th nearest-neighbour distances (self excluded), one per point.
std::vector<double> KDistanceCurve(std::span<const Point> points, int k);

struct ClusterNaming {
  std::string entity_noun = "points";
  std::string x_noun;  // e.g. "income"
  std::string y_noun;  // e.g. "spending score"
  std::map<int, std::string> overrides;
};

// Noun used for an axis in cluster descriptions: lower-cased label with any
// parenthesised suffix removed, e.g. "Spending Score (1-100)" -> "spending score".
std::string AxisNoun(const std::string& axis_label);

// Ranks cluster sizes and proposes "<level> <x noun> and <level> <y noun>"
// descriptions, level in {low, average, high} from the cluster centroid
// against the nearest-rank 1/3 and 2/3 quantiles of each raw axis.
ClusterResult SummarizeClusters(std::span<const int> labels, std::span<const Point> raw_points,
                                const ClusterNaming& naming);

// Scale -> DBSCAN -> summary in one step.
ClusterResult ClusterPoints(std::span<const Point> raw_points, const ClusterParams& params,
                            const ClusterNaming& naming);

// Nearest-rank quantile: sorted[ceil(num/den * n) - 1].
double NearestRankQuantile(std::vector<double> values, std::size_t num, std::size_t den);

// ---------------------------------------------------------------------------
// Analysis document: what an analysis run hands to prompts, charts and the service.

enum class AnalysisMethod { kRegression, kCluster };

struct AnalysisDocument {
  std::string source;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<std::string> label_column;
  std::vector<std::string> other_columns;
  ValueRange x_range;
  ValueRange y_range;
  std::variant<RegressionResult, ClusterResult> result;
  PointSet points;  // may be empty when loaded from a metadata-only file

  AnalysisMethod method() const {
    return std::holds_alternative<RegressionResult>(result) ? AnalysisMethod::kRegression
                                                            : AnalysisMethod::kCluster;
  }
};

struct RegressionOptions {
  double threshold = kDefaultOutlierThreshold;
};

AnalysisDocument AnalyzeRegression(const AxisSelection& selection, const RegressionOptions& options = {});
AnalysisDocument AnalyzeClusters(const AxisSelection& selection, const ClusterParams& params,
                                 ClusterNaming naming);

// Everything needed to go from a table to an analysis document; shared by the
// CLI and the service.
struct AnalysisRequest {
  std::string x;
  std::string y;
  std::optional<std::string> label;
  std::string title;
  AnalysisMethod method = AnalysisMethod::kRegression;
  RegressionOptions regression;
  ClusterParams cluster;
  ClusterNaming naming;
};

AnalysisDocument RunAnalysis(std::shared_ptr<const DataTable> table, const AnalysisRequest& request);

std::string_view ToString(AnalysisMethod method);
AnalysisMethod ParseAnalysisMethod(std::string_view text);

}  // namespace vizcap
