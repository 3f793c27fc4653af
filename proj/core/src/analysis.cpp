#include "vizcap/analysis.hpp"

#include "vizcap/error.hpp"

namespace vizcap {

AnalysisDocument RunAnalysis(std::shared_ptr<const DataTable> table, const AnalysisRequest& request) {
  const auto selection = SelectAxes(std::move(table), request.x, request.y, request.label, request.title);
  if (request.method == AnalysisMethod::kRegression) return AnalyzeRegression(selection, request.regression);
  return AnalyzeClusters(selection, request.cluster, request.naming);
}

std::string_view ToString(AnalysisMethod method) {
  return method == AnalysisMethod::kRegression ? "regression" : "cluster";
}

AnalysisMethod ParseAnalysisMethod(std::string_view text) {
  if (text == "regression") return AnalysisMethod::kRegression;
  if (text == "cluster") return AnalysisMethod::kCluster;
  throw Error(ErrorCode::kValidation, "unknown method '" + std::string(text) + "' (expected regression|cluster)");
}

}  // namespace vizcap
