#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "vizcap/analysis.hpp"

namespace vizcap {

// Analysis document JSON (version 1):
//   { "version": 1, "source", "title", "x", "y", "label": string|null,
//     "other_columns": [..], "x_range": {"min","max","integral"}, "y_range": {..},
//     "method": "regression"|"cluster",
//     "regression": { "intercept","slope","pearson_r","threshold",
//                     "candidates": [Candidate], "confirmed": [Candidate] },
//     "cluster": { "params": {"eps","min_pts","scale"}, "n_clusters",
//                  "sizes_ranked": [{"cluster_id","size"}],
//                  "descriptions": [{"cluster_id","text"}],
//                  "noise_indices": [..], "entity_noun", "labels": [..] },
//     "points": [{"row","x","y","label"}] }
// Candidate = {"row_index","label","t_value","direction": "lower"|"higher"};
// an infinite t_value is written as the string "inf" or "-inf".
nlohmann::json ToJson(const AnalysisDocument& doc);
AnalysisDocument AnalysisFromJson(const nlohmann::json& j);

std::string SerializeAnalysis(const AnalysisDocument& doc);
// Throws ParseError with the byte offset for malformed text.
AnalysisDocument ParseAnalysis(std::string_view text);

AnalysisDocument LoadAnalysisFile(const std::string& path);
void SaveAnalysisFile(const AnalysisDocument& doc, const std::string& path);

nlohmann::json ToJson(const ValueRange& range);
ValueRange RangeFromJson(const nlohmann::json& j);

std::string_view ToString(FeatureScale scale);
FeatureScale ParseFeatureScale(std::string_view text);
std::string_view ToString(Direction direction);

// Reads a text file whole; Error(kIo) names the path when it cannot be opened.
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, std::string_view text);

// Parses text as JSON, mapping syntax errors to ParseError with the byte offset.
nlohmann::json ParseJsonText(std::string_view text, std::string_view what);

}  // namespace vizcap
