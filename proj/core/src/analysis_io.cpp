#include "vizcap/analysis_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vizcap/error.hpp"

namespace vizcap {

using nlohmann::json;

namespace {

json EncodeNumber(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double DecodeNumber(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::kParse, "expected a number, got \"" + s + "\"");
  }
  return j.get<double>();
}

json CandidateJson(const OutlierCandidate& c) {
  return {{"row_index", c.row_index},
          {"label", c.label},
          {"t_value", EncodeNumber(c.t_value)},
          {"direction", ToString(c.direction)}};
}

OutlierCandidate CandidateFromJson(const json& j) {
  OutlierCandidate c;
  c.row_index = j.at("row_index").get<std::size_t>();
  c.label = j.at("label").get<std::string>();
  c.t_value = DecodeNumber(j.at("t_value"));
  const auto dir = j.at("direction").get<std::string>();
  if (dir == "lower") {
    c.direction = Direction::kLower;
  } else if (dir == "higher") {
    c.direction = Direction::kHigher;
  } else {
    throw Error(ErrorCode::kParse, "unknown outlier direction '" + dir + "'");
  }
  return c;
}

}  // namespace

std::string_view ToString(FeatureScale scale) { return scale == FeatureScale::kZScore ? "zscore" : "none"; }

FeatureScale ParseFeatureScale(std::string_view text) {
  if (text == "zscore") return FeatureScale::kZScore;
  if (text == "none") return FeatureScale::kNone;
  throw Error(ErrorCode::kValidation, "unknown scale '" + std::string(text) + "' (expected zscore|none)");
}

std::string_view ToString(Direction direction) { return direction == Direction::kLower ? "lower" : "higher"; }

json ToJson(const ValueRange& range) {
  return {{"min", range.min}, {"max", range.max}, {"integral", range.integral}};
}

ValueRange RangeFromJson(const json& j) {
  ValueRange r;
  r.min = j.at("min").get<double>();
  r.max = j.at("max").get<double>();
  r.integral = j.value("integral", std::trunc(r.min) == r.min && std::trunc(r.max) == r.max);
  return r;
}

json ToJson(const AnalysisDocument& doc) {
  json j;
  j["version"] = 1;
  j["source"] = doc.source;
  j["title"] = doc.title;
  j["x"] = doc.x_label;
  j["y"] = doc.y_label;
  j["label"] = doc.label_column ? json(*doc.label_column) : json(nullptr);
  j["other_columns"] = doc.other_columns;
  j["x_range"] = ToJson(doc.x_range);
  j["y_range"] = ToJson(doc.y_range);
  if (const auto* reg = std::get_if<RegressionResult>(&doc.result)) {
    j["method"] = "regression";
    json r;
    r["intercept"] = reg->intercept;
    r["slope"] = reg->slope;
    r["pearson_r"] = reg->pearson_r;
    r["threshold"] = reg->threshold;
    r["candidates"] = json::array();
    for (const auto& c : reg->candidates) r["candidates"].push_back(CandidateJson(c));
    r["confirmed"] = json::array();
    for (const auto& c : reg->confirmed) r["confirmed"].push_back(CandidateJson(c));
    j["regression"] = std::move(r);
  } else {
    const auto& cl = std::get<ClusterResult>(doc.result);
    j["method"] = "cluster";
    json c;
    c["params"] = {{"eps", cl.params.eps}, {"min_pts", cl.params.min_pts}, {"scale", ToString(cl.params.scale)}};
    c["n_clusters"] = cl.n_clusters;
    c["sizes_ranked"] = json::array();
    for (const auto& s : cl.sizes_ranked) c["sizes_ranked"].push_back({{"cluster_id", s.cluster_id}, {"size", s.size}});
    c["descriptions"] = json::array();
    for (const auto& d : cl.descriptions) c["descriptions"].push_back({{"cluster_id", d.cluster_id}, {"text", d.text}});
    c["noise_indices"] = cl.noise_indices;
    c["entity_noun"] = cl.entity_noun;
    c["labels"] = cl.labels;
    j["cluster"] = std::move(c);
  }
  j["points"] = json::array();
  for (std::size_t i = 0; i < doc.points.size(); ++i) {
    j["points"].push_back({{"row", doc.points.rows[i]},
                           {"x", doc.points.points[i].x},
                           {"y", doc.points.points[i].y},
                           {"label", doc.points.labels[i]}});
  }
  return j;
}

AnalysisDocument AnalysisFromJson(const json& j) {
  try {
    if (j.value("version", 1) != 1) {
      throw Error(ErrorCode::kParse, "unsupported analysis version " + j.at("version").dump());
    }
    AnalysisDocument doc;
    doc.source = j.value("source", std::string{});
    doc.title = j.at("title").get<std::string>();
    doc.x_label = j.at("x").get<std::string>();
    doc.y_label = j.at("y").get<std::string>();
    if (j.contains("label") && !j["label"].is_null()) doc.label_column = j["label"].get<std::string>();
    doc.other_columns = j.value("other_columns", std::vector<std::string>{});
    doc.x_range = RangeFromJson(j.at("x_range"));
    doc.y_range = RangeFromJson(j.at("y_range"));
    const auto method = j.at("method").get<std::string>();
    if (method == "regression") {
      const auto& r = j.at("regression");
      RegressionResult reg;
      reg.intercept = r.at("intercept").get<double>();
      reg.slope = r.at("slope").get<double>();
      reg.pearson_r = r.at("pearson_r").get<double>();
      reg.threshold = r.value("threshold", kDefaultOutlierThreshold);
      for (const auto& c : r.value("candidates", json::array())) reg.candidates.push_back(CandidateFromJson(c));
      for (const auto& c : r.value("confirmed", json::array())) reg.confirmed.push_back(CandidateFromJson(c));
      doc.result = std::move(reg);
    } else if (method == "cluster") {
      const auto& c = j.at("cluster");
      ClusterResult cl;
      if (c.contains("params")) {
        const auto& p = c["params"];
        cl.params.eps = p.value("eps", cl.params.eps);
        cl.params.min_pts = p.value("min_pts", cl.params.min_pts);
        cl.params.scale = ParseFeatureScale(p.value("scale", std::string("zscore")));
      }
      cl.n_clusters = c.at("n_clusters").get<int>();
      for (const auto& s : c.at("sizes_ranked")) {
        cl.sizes_ranked.push_back({s.at("cluster_id").get<int>(), s.at("size").get<std::size_t>()});
      }
      for (const auto& d : c.at("descriptions")) {
        cl.descriptions.push_back({d.at("cluster_id").get<int>(), d.at("text").get<std::string>()});
      }
      cl.noise_indices = c.value("noise_indices", std::vector<std::size_t>{});
      cl.entity_noun = c.value("entity_noun", std::string("points"));
      cl.labels = c.value("labels", std::vector<int>{});
      doc.result = std::move(cl);
    } else {
      throw Error(ErrorCode::kParse, "unknown analysis method '" + method + "'");
    }
    for (const auto& p : j.value("points", json::array())) {
      doc.points.rows.push_back(p.at("row").get<std::size_t>());
      doc.points.points.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
      doc.points.labels.push_back(p.value("label", "row " + std::to_string(doc.points.rows.back())));
    }
    return doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed analysis document: ") + e.what(), 0);
  }
}

json ParseJsonText(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + " is not valid JSON at byte " + std::to_string(e.byte) + ": " + e.what(),
                     e.byte);
  }
}

std::string SerializeAnalysis(const AnalysisDocument& doc) { return ToJson(doc).dump(2) + "\n"; }

AnalysisDocument ParseAnalysis(std::string_view text) {
  return AnalysisFromJson(ParseJsonText(text, "analysis document"));
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

AnalysisDocument LoadAnalysisFile(const std::string& path) { return ParseAnalysis(ReadTextFile(path)); }

void SaveAnalysisFile(const AnalysisDocument& doc, const std::string& path) {
  WriteTextFile(path, SerializeAnalysis(doc));
}

}  // namespace vizcap
