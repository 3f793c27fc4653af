#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "vizcap/analysis.hpp"
#include "vizcap/dataset.hpp"
#include "vizcap/error.hpp"

namespace vizcap {

struct OutlierMention {
  std::string label;
  Direction direction = Direction::kLower;
  friend bool operator==(const OutlierMention&, const OutlierMention&) = default;
};

struct RegressionFacts {
  double intercept = 0.0;
  double slope = 0.0;
  double pearson_r = 0.0;
  std::vector<OutlierMention> outliers;  // confirmed only
  friend bool operator==(const RegressionFacts&, const RegressionFacts&) = default;
};

struct RankedCluster {
  std::size_t size = 0;
  std::string description;
  friend bool operator==(const RankedCluster&, const RankedCluster&) = default;
};

struct ClusterFacts {
  std::vector<RankedCluster> clusters;  // largest first
  std::string entity_noun = "points";
  friend bool operator==(const ClusterFacts&, const ClusterFacts&) = default;
};

// The facts a tier-1 template is filled with.
struct VisualizationMetadata {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::string> other_columns;
  ValueRange x_range;
  ValueRange y_range;
  std::variant<RegressionFacts, ClusterFacts> facts;

  AnalysisMethod kind() const {
    return std::holds_alternative<RegressionFacts>(facts) ? AnalysisMethod::kRegression : AnalysisMethod::kCluster;
  }
  friend bool operator==(const VisualizationMetadata&, const VisualizationMetadata&) = default;
};

VisualizationMetadata MetadataFromAnalysis(const AnalysisDocument& doc);

// Wording knobs for the template. The default reads "Other columns from the
// data set include A, B, and C."; Compact() reads "...from the dataset include
// A, B, C." as in the store and mall prompts.
struct PromptStyle {
  std::string dataset_term = "data set";
  bool oxford_other_columns = true;

  static PromptStyle Standard() { return {}; }
  static PromptStyle Compact() { return {"dataset", false}; }
  friend bool operator==(const PromptStyle&, const PromptStyle&) = default;
};

enum class TurnKind { kInstruction, kQuestion, kEdit };

struct Turn {
  TurnKind kind = TurnKind::kInstruction;
  std::string user_text;
  std::optional<std::string> caption;  // nullopt while the generation is pending
  friend bool operator==(const Turn&, const Turn&) = default;
};

// A filled template plus the refinement turns layered on top of it. Values
// are immutable in spirit: the Append* functions return a new document.
struct PromptDocument {
  std::string base;
  std::optional<std::string> base_caption;  // the tier-1 caption
  std::vector<Turn> turns;

  bool has_pending_turn() const { return !turns.empty() && !turns.back().caption; }
  friend bool operator==(const PromptDocument&, const PromptDocument&) = default;
};

struct GenerationParams {
  double temperature = 0.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  int max_completion_tokens = 256;
  int context_limit = 2048;
  std::string model = "text-davinci-002";
  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

// Error(kValidation) unless temperature >= 0 and 0 < max_completion < context_limit.
void Validate(const GenerationParams& params);

enum class TierLevel { kTemplateOnly = 1, kTemplateInstruction = 2, kTemplateInstructionQa = 3 };

enum class QuantityRole {
  kCoefficient,        // 2 decimals, trailing zeros trimmed, >= 1 fractional digit
  kRangeEndpoint,      // whole numbers bare, otherwise up to 3 decimals
  kRealRangeEndpoint,  // like kRangeEndpoint but always >= 1 fractional digit
};

std::string FormatQuantity(double value, QuantityRole role);

// "A", "A and B", "A, B, and C" (oxford) or "A, B, C" (plain commas).
std::string JoinList(const std::vector<std::string>& items, bool oxford);

PromptDocument BuildTier1Prompt(const VisualizationMetadata& meta, const PromptStyle& style = {});

PromptDocument WithBaseCaption(PromptDocument doc, std::string caption);
PromptDocument AppendInstruction(PromptDocument doc, std::string sentence);
// Instructions are allowed only as the first turn; questions and edits only
// after it. A pending turn must be completed (or discarded) first.
PromptDocument AppendTurn(PromptDocument doc, TurnKind kind, std::string user_text);
PromptDocument CompletePendingTurn(PromptDocument doc, std::string caption);
PromptDocument DiscardPendingTurn(PromptDocument doc);

TierLevel Tier(const PromptDocument& doc);

// The prompt for the newest generation: base, the tier-1 caption, every
// earlier turn with its caption, then the newest user text; blocks joined by
// a blank line. With no turns this is the base alone.
std::string AssembleRollingPrompt(const PromptDocument& doc);

// ceil(code points / 4).
std::size_t EstimateTokens(std::string_view text);

struct BudgetReport {
  std::size_t prompt_tokens = 0;
  int max_completion_tokens = 0;
  int context_limit = 0;
  long long headroom = 0;  // context_limit - prompt - completion; negative when over
  bool ok() const { return headroom >= 0; }
};

class BudgetExceededError : public Error {
 public:
  explicit BudgetExceededError(const BudgetReport& report);
  const BudgetReport& report() const noexcept { return report_; }

 private:
  BudgetReport report_;
};

BudgetReport MeasureBudget(std::string_view prompt, const GenerationParams& params);
// Returns the report when it fits; throws BudgetExceededError otherwise.
BudgetReport CheckPromptBudget(std::string_view prompt, const GenerationParams& params);
BudgetReport CheckBudget(const PromptDocument& doc, const GenerationParams& params);

std::string_view ToString(TurnKind kind);
TurnKind ParseTurnKind(std::string_view text);

nlohmann::json ToJson(const PromptDocument& doc);
PromptDocument PromptDocumentFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const GenerationParams& params);
GenerationParams GenerationParamsFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const VisualizationMetadata& meta);
VisualizationMetadata MetadataFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const PromptStyle& style);
PromptStyle PromptStyleFromJson(const nlohmann::json& j);

}  // namespace vizcap
