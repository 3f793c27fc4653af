#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>

#include "vizcap/analysis.hpp"
#include "vizcap/error.hpp"

namespace vizcap {

namespace {

constexpr int kUnvisited = -2;

// Uniform grid with cell side eps: every eps-neighbour of a point lies in
// the 3x3 block of cells around it.
class NeighbourGrid {
 public:
  NeighbourGrid(std::span<const Point> points, double eps)
      : points_(points), eps_(eps), eps_sq_(eps * eps) {
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[Key(CellOf(points[i].x), CellOf(points[i].y))].push_back(i);
    }
  }

  void Query(std::size_t i, std::vector<std::size_t>& out) const {
    out.clear();
    const auto& p = points_[i];
    const std::int64_t cx = CellOf(p.x);
    const std::int64_t cy = CellOf(p.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(Key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (const auto j : it->second) {
          const double ddx = points_[j].x - p.x;
          const double ddy = points_[j].y - p.y;
          if (ddx * ddx + ddy * ddy <= eps_sq_) out.push_back(j);
        }
      }
    }
  }

  // Cell coordinates must fit comfortably in 32 bits for the packed key.
  static bool Usable(std::span<const Point> points, double eps) {
    for (const auto& p : points) {
      if (std::abs(p.x / eps) > 1e9 || std::abs(p.y / eps) > 1e9) return false;
    }
    return true;
  }

 private:
  std::int64_t CellOf(double v) const { return static_cast<std::int64_t>(std::floor(v / eps_)); }
  static std::uint64_t Key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
  }

  std::span<const Point> points_;
  double eps_;
  double eps_sq_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

void BruteForceQuery(std::span<const Point> points, std::size_t i, double eps_sq,
                     std::vector<std::size_t>& out) {
  out.clear();
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double dx = points[j].x - points[i].x;
    const double dy = points[j].y - points[i].y;
    if (dx * dx + dy * dy <= eps_sq) out.push_back(j);
  }
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

const char* Level(double centroid, double low_cut, double high_cut) {
  if (centroid < low_cut) return "low";
  if (centroid > high_cut) return "high";
  return "average";
}

}  // namespace

std::vector<Point> ScaleFeatures(std::span<const Point> points, FeatureScale scale) {
  std::vector<Point> out(points.begin(), points.end());
  if (scale == FeatureScale::kNone) return out;
  if (points.size() < 2) {
    throw Error(ErrorCode::kScaling, "z-score scaling needs at least 2 points");
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double vx = 0.0;
  double vy = 0.0;
  for (const auto& p : points) {
    vx += (p.x - mx) * (p.x - mx);
    vy += (p.y - my) * (p.y - my);
  }
  if (vx == 0.0) throw Error(ErrorCode::kScaling, "x has zero variance");
  if (vy == 0.0) throw Error(ErrorCode::kScaling, "y has zero variance");
  const double sx = std::sqrt(vx / (n - 1.0));
  const double sy = std::sqrt(vy / (n - 1.0));
  for (auto& p : out) {
    p.x = (p.x - mx) / sx;
    p.y = (p.y - my) / sy;
  }
  return out;
}

std::vector<int> RunDbscan(std::span<const Point> points, double eps, int min_pts) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::kParameter, "eps must be a positive finite number");
  }
  if (min_pts < 1) throw Error(ErrorCode::kParameter, "min_pts must be at least 1");

  const std::size_t n = points.size();
  std::vector<int> labels(n, kUnvisited);
  if (n == 0) return labels;

  std::optional<NeighbourGrid> grid;
  if (NeighbourGrid::Usable(points, eps)) grid.emplace(points, eps);
  std::vector<std::size_t> neighbours;
  auto query = [&](std::size_t i) {
    if (grid) {
      grid->Query(i, neighbours);
    } else {
      BruteForceQuery(points, i, eps * eps, neighbours);
    }
  };

  const auto min_count = static_cast<std::size_t>(min_pts);
  int cluster = 0;
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    query(i);
    if (neighbours.size() < min_count) {
      labels[i] = kNoise;
      continue;
    }
    labels[i] = cluster;
    frontier.assign(neighbours.begin(), neighbours.end());
    while (!frontier.empty()) {
      const std::size_t j = frontier.front();
      frontier.pop_front();
      if (labels[j] == kNoise) labels[j] = cluster;  // border point
      if (labels[j] != kUnvisited) continue;
      labels[j] = cluster;
      query(j);
      if (neighbours.size() >= min_count) {
        frontier.insert(frontier.end(), neighbours.begin(), neighbours.end());
      }
    }
    ++cluster;
  }
  return labels;
}

std::vector<double> KDistanceCurve(std::span<const Point> points, int k) {
  const std::size_t n = points.size();
  if (k < 1 || static_cast<std::size_t>(k) >= n) {
    throw Error(ErrorCode::kParameter,
                "k must satisfy 1 <= k < n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  std::vector<double> curve;
  curve.reserve(n);
  std::vector<double> dist;
  dist.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.push_back(std::hypot(points[j].x - points[i].x, points[j].y - points[i].y));
    }
    const auto kth = dist.begin() + (k - 1);
    std::nth_element(dist.begin(), kth, dist.end());
    curve.push_back(*kth);
  }
  std::sort(curve.begin(), curve.end());
  return curve;
}

double NearestRankQuantile(std::vector<double> values, std::size_t num, std::size_t den) {
  if (values.empty()) throw Error(ErrorCode::kInsufficientData, "quantile of an empty list");
  if (den == 0 || num > den) throw Error(ErrorCode::kParameter, "quantile fraction out of range");
  const std::size_t n = values.size();
  std::size_t rank = (num * n + den - 1) / den;  // ceil(num/den * n)
  rank = std::max<std::size_t>(rank, 1);
  std::sort(values.begin(), values.end());
  return values[rank - 1];
}

std::string AxisNoun(const std::string& axis_label) {
  std::string noun = axis_label;
  const auto paren = noun.find('(');
  if (paren != std::string::npos) noun.erase(paren);
  while (!noun.empty() && std::isspace(static_cast<unsigned char>(noun.back()))) noun.pop_back();
  while (!noun.empty() && std::isspace(static_cast<unsigned char>(noun.front()))) noun.erase(0, 1);
  return Lower(noun.empty() ? axis_label : noun);
}

const std::string& ClusterResult::description(int cluster_id) const {
  for (const auto& d : descriptions) {
    if (d.cluster_id == cluster_id) return d.text;
  }
  throw Error(ErrorCode::kNotFound, "no cluster " + std::to_string(cluster_id));
}

ClusterResult SummarizeClusters(std::span<const int> labels, std::span<const Point> raw_points,
                                const ClusterNaming& naming) {
  if (labels.size() != raw_points.size()) {
    throw Error(ErrorCode::kValidation, "labels and points differ in length");
  }
  struct Accumulator {
    std::size_t size = 0;
    double sum_x = 0.0;
    double sum_y = 0.0;
  };
  std::map<int, Accumulator> clusters;
  ClusterResult result;
  result.entity_noun = naming.entity_noun.empty() ? "points" : naming.entity_noun;
  result.labels.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      result.noise_indices.push_back(i);
      continue;
    }
    auto& acc = clusters[labels[i]];
    ++acc.size;
    acc.sum_x += raw_points[i].x;
    acc.sum_y += raw_points[i].y;
  }
  for (const auto& [id, text] : naming.overrides) {
    if (!clusters.contains(id)) {
      throw Error(ErrorCode::kValidation, "description override for unknown cluster " + std::to_string(id));
    }
  }
  result.n_clusters = static_cast<int>(clusters.size());
  for (const auto& [id, acc] : clusters) result.sizes_ranked.push_back({id, acc.size});
  std::stable_sort(result.sizes_ranked.begin(), result.sizes_ranked.end(),
                   [](const ClusterSize& a, const ClusterSize& b) {
                     return a.size != b.size ? a.size > b.size : a.cluster_id < b.cluster_id;
                   });
  if (clusters.empty()) return result;

  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(raw_points.size());
  ys.reserve(raw_points.size());
  for (const auto& p : raw_points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  const double x_low = NearestRankQuantile(xs, 1, 3);
  const double x_high = NearestRankQuantile(xs, 2, 3);
  const double y_low = NearestRankQuantile(ys, 1, 3);
  const double y_high = NearestRankQuantile(ys, 2, 3);
  const std::string x_noun = naming.x_noun.empty() ? "x" : naming.x_noun;
  const std::string y_noun = naming.y_noun.empty() ? "y" : naming.y_noun;

  for (const auto& entry : result.sizes_ranked) {
    if (const auto it = naming.overrides.find(entry.cluster_id); it != naming.overrides.end()) {
      result.descriptions.push_back({entry.cluster_id, it->second});
      continue;
    }
    const auto& acc = clusters.at(entry.cluster_id);
    const double cx = acc.sum_x / static_cast<double>(acc.size);
    const double cy = acc.sum_y / static_cast<double>(acc.size);
    result.descriptions.push_back({entry.cluster_id, std::string(Level(cx, x_low, x_high)) + " " + x_noun +
                                                         " and " + Level(cy, y_low, y_high) + " " + y_noun});
  }
  return result;
}

ClusterResult ClusterPoints(std::span<const Point> raw_points, const ClusterParams& params,
                            const ClusterNaming& naming) {
  const auto scaled = ScaleFeatures(raw_points, params.scale);
  const auto labels = RunDbscan(scaled, params.eps, params.min_pts);
  ClusterResult result = SummarizeClusters(labels, raw_points, naming);
  result.params = params;
  return result;
}

AnalysisDocument AnalyzeClusters(const AxisSelection& selection, const ClusterParams& params,
                                 ClusterNaming naming) {
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
  if (naming.x_noun.empty()) naming.x_noun = AxisNoun(selection.x);
  if (naming.y_noun.empty()) naming.y_noun = AxisNoun(selection.y);
  doc.result = ClusterPoints(doc.points.points, params, naming);
  return doc;
}

}  // namespace vizcap
