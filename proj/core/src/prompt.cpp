#include "vizcap/prompt.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "vizcap/analysis_io.hpp"

namespace vizcap {

using nlohmann::json;

namespace {

// Fixed-point rendering with trailing zeros trimmed, keeping at least one
// fractional digit.
std::string FixedTrimmed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (const auto dot = s.find('.'); dot != std::string::npos) {
    while (s.size() > dot + 2 && s.back() == '0') s.pop_back();
  }
  if (s.rfind("-0.0", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

std::string LowerFirst(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string FormatRange(const ValueRange& range, double v) {
  return FormatQuantity(v, range.integral ? QuantityRole::kRangeEndpoint : QuantityRole::kRealRangeEndpoint);
}

void RequireText(const std::string& text, std::string_view what) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kValidation, std::string(what) + " must not be empty");
  }
}

}  // namespace

std::string FormatQuantity(double value, QuantityRole role) {
  switch (role) {
    case QuantityRole::kCoefficient:
      return FixedTrimmed(value, 2);
    case QuantityRole::kRangeEndpoint:
      if (std::trunc(value) == value && std::abs(value) < 1e15) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.0f", value == 0.0 ? 0.0 : value);
        return buf;
      }
      return FixedTrimmed(value, 3);
    case QuantityRole::kRealRangeEndpoint:
      return FixedTrimmed(value, 3);
  }
  return FixedTrimmed(value, 3);
}

std::string JoinList(const std::vector<std::string>& items, bool oxford) {
  std::string out;
  if (items.empty()) return out;
  if (items.size() == 1) return items.front();
  if (oxford && items.size() == 2) return items[0] + " and " + items[1];
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    if (oxford && i + 1 == items.size()) out += "and ";
    out += items[i];
  }
  return out;
}

VisualizationMetadata MetadataFromAnalysis(const AnalysisDocument& doc) {
  VisualizationMetadata meta;
  meta.title = doc.title;
  meta.x_label = doc.x_label;
  meta.y_label = doc.y_label;
  meta.other_columns = doc.other_columns;
  meta.x_range = doc.x_range;
  meta.y_range = doc.y_range;
  if (const auto* reg = std::get_if<RegressionResult>(&doc.result)) {
    RegressionFacts facts{reg->intercept, reg->slope, reg->pearson_r, {}};
    for (const auto& c : reg->confirmed) facts.outliers.push_back({c.label, c.direction});
    meta.facts = std::move(facts);
  } else {
    const auto& cl = std::get<ClusterResult>(doc.result);
    ClusterFacts facts;
    facts.entity_noun = cl.entity_noun;
    for (const auto& s : cl.sizes_ranked) facts.clusters.push_back({s.size, cl.description(s.cluster_id)});
    meta.facts = std::move(facts);
  }
  return meta;
}

PromptDocument BuildTier1Prompt(const VisualizationMetadata& meta, const PromptStyle& style) {
  RequireText(meta.title, "title");
  RequireText(meta.x_label, "x label");
  RequireText(meta.y_label, "y label");

  std::string text = "Generate an engaging caption for a scatter plot titled " + meta.title +
                     " with the x-axis labeled as " + meta.x_label + " and the y-axis labeled as " +
                     meta.y_label + ".";
  if (!meta.other_columns.empty()) {
    text += " Other columns from the " + style.dataset_term + " include " +
            JoinList(meta.other_columns, style.oxford_other_columns) + ".";
  }
  text += " The range of " + meta.x_label + " is " + FormatRange(meta.x_range, meta.x_range.min) + " to " +
          FormatRange(meta.x_range, meta.x_range.max) + ".";
  text += " The range of " + meta.y_label + " is " + FormatRange(meta.y_range, meta.y_range.min) + " to " +
          FormatRange(meta.y_range, meta.y_range.max) + ".";

  if (const auto* reg = std::get_if<RegressionFacts>(&meta.facts)) {
    text += " The linear regression intercept is " + FormatQuantity(reg->intercept, QuantityRole::kCoefficient) +
            " and the slope is " + FormatQuantity(reg->slope, QuantityRole::kCoefficient) + ".";
    text += " The correlation coefficient is " + FormatQuantity(reg->pearson_r, QuantityRole::kCoefficient) + ".";
    if (!reg->outliers.empty()) {
      std::string clauses;
      for (std::size_t i = 0; i < reg->outliers.size(); ++i) {
        const auto& o = reg->outliers[i];
        if (i > 0) clauses += ", and ";
        clauses += o.label + " which had a " + std::string(ToString(o.direction)) + " " +
                   LowerFirst(meta.y_label) + " than would be expected of its " + meta.x_label;
      }
      text += " Outliers found are " + clauses + ".";
    }
  } else {
    const auto& cl = std::get<ClusterFacts>(meta.facts);
    if (cl.clusters.empty()) {
      throw Error(ErrorCode::kBuild, "cluster template needs at least one cluster");
    }
    text += " The number of clusters is " + std::to_string(cl.clusters.size()) + ".";
    text += " The largest cluster has " + std::to_string(cl.clusters.front().size) + " " + cl.entity_noun +
            " with " + cl.clusters.front().description + ".";
    if (cl.clusters.size() > 1) {
      std::vector<std::string> rest;
      for (std::size_t i = 1; i < cl.clusters.size(); ++i) rest.push_back(cl.clusters[i].description);
      text += " Other clusters include " + JoinList(rest, true) + ".";
    }
  }
  return PromptDocument{std::move(text), std::nullopt, {}};
}

PromptDocument WithBaseCaption(PromptDocument doc, std::string caption) {
  doc.base_caption = std::move(caption);
  return doc;
}

PromptDocument AppendInstruction(PromptDocument doc, std::string sentence) {
  return AppendTurn(std::move(doc), TurnKind::kInstruction, std::move(sentence));
}

PromptDocument AppendTurn(PromptDocument doc, TurnKind kind, std::string user_text) {
  RequireText(user_text, "turn text");
  if (doc.has_pending_turn()) {
    throw Error(ErrorCode::kTierProtocol, "the previous turn is still pending; retry or discard it first");
  }
  if (kind == TurnKind::kInstruction && !doc.turns.empty()) {
    throw Error(ErrorCode::kTierProtocol, "only one instruction is allowed and it must be the first turn");
  }
  if (kind != TurnKind::kInstruction && doc.turns.empty()) {
    throw Error(ErrorCode::kTierProtocol,
                std::string("a ") + std::string(ToString(kind)) + " needs an instruction turn before it");
  }
  doc.turns.push_back({kind, std::move(user_text), std::nullopt});
  return doc;
}

PromptDocument CompletePendingTurn(PromptDocument doc, std::string caption) {
  if (!doc.has_pending_turn()) throw Error(ErrorCode::kValidation, "no pending turn to complete");
  doc.turns.back().caption = std::move(caption);
  return doc;
}

PromptDocument DiscardPendingTurn(PromptDocument doc) {
  if (!doc.has_pending_turn()) throw Error(ErrorCode::kValidation, "no pending turn to discard");
  doc.turns.pop_back();
  return doc;
}

TierLevel Tier(const PromptDocument& doc) {
  bool instruction = false;
  bool qa = false;
  for (const auto& t : doc.turns) {
    if (t.kind == TurnKind::kInstruction) {
      instruction = true;
    } else {
      qa = true;
    }
  }
  const int level = std::min(3, 1 + int(instruction) + int(qa));
  return static_cast<TierLevel>(level);
}

std::string AssembleRollingPrompt(const PromptDocument& doc) {
  std::string out = doc.base;
  if (doc.turns.empty()) return out;
  if (!doc.base_caption) throw Error(ErrorCode::kValidation, "turns present but the tier-1 caption is missing");
  out += "\n\n";
  out += *doc.base_caption;
  for (std::size_t i = 0; i < doc.turns.size(); ++i) {
    const auto& turn = doc.turns[i];
    out += "\n\n";
    out += turn.user_text;
    if (i + 1 < doc.turns.size()) {
      if (!turn.caption) {
        throw Error(ErrorCode::kValidation, "turn " + std::to_string(i + 1) + " has no caption");
      }
      out += "\n\n";
      out += *turn.caption;
    }
  }
  return out;
}

std::size_t EstimateTokens(std::string_view text) {
  std::size_t code_points = 0;
  for (const char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++code_points;
  }
  return (code_points + 3) / 4;
}

void Validate(const GenerationParams& params) {
  if (!(params.temperature >= 0.0)) throw Error(ErrorCode::kValidation, "temperature must be >= 0");
  if (params.max_completion_tokens <= 0) throw Error(ErrorCode::kValidation, "max_completion_tokens must be > 0");
  if (params.max_completion_tokens >= params.context_limit) {
    throw Error(ErrorCode::kValidation, "max_completion_tokens must be below context_limit");
  }
}

BudgetExceededError::BudgetExceededError(const BudgetReport& report)
    : Error(ErrorCode::kBudgetExceeded,
            "prompt needs ~" + std::to_string(report.prompt_tokens) + " tokens plus " +
                std::to_string(report.max_completion_tokens) + " completion tokens, over the context limit of " +
                std::to_string(report.context_limit) + " by " + std::to_string(-report.headroom)),
      report_(report) {}

BudgetReport MeasureBudget(std::string_view prompt, const GenerationParams& params) {
  BudgetReport report;
  report.prompt_tokens = EstimateTokens(prompt);
  report.max_completion_tokens = params.max_completion_tokens;
  report.context_limit = params.context_limit;
  report.headroom = static_cast<long long>(params.context_limit) - static_cast<long long>(report.prompt_tokens) -
                    params.max_completion_tokens;
  return report;
}

BudgetReport CheckPromptBudget(std::string_view prompt, const GenerationParams& params) {
  Validate(params);
  const auto report = MeasureBudget(prompt, params);
  if (!report.ok()) throw BudgetExceededError(report);
  return report;
}

BudgetReport CheckBudget(const PromptDocument& doc, const GenerationParams& params) {
  return CheckPromptBudget(AssembleRollingPrompt(doc), params);
}

std::string_view ToString(TurnKind kind) {
  switch (kind) {
    case TurnKind::kInstruction: return "instruction";
    case TurnKind::kQuestion: return "question";
    case TurnKind::kEdit: return "edit";
  }
  return "question";
}

TurnKind ParseTurnKind(std::string_view text) {
  if (text == "instruction") return TurnKind::kInstruction;
  if (text == "question") return TurnKind::kQuestion;
  if (text == "edit") return TurnKind::kEdit;
  throw Error(ErrorCode::kValidation, "unknown turn kind '" + std::string(text) + "'");
}

json ToJson(const PromptDocument& doc) {
  json j;
  j["base"] = doc.base;
  j["base_caption"] = doc.base_caption ? json(*doc.base_caption) : json(nullptr);
  j["turns"] = json::array();
  for (const auto& t : doc.turns) {
    j["turns"].push_back({{"kind", ToString(t.kind)},
                          {"user_text", t.user_text},
                          {"caption", t.caption ? json(*t.caption) : json(nullptr)}});
  }
  return j;
}

PromptDocument PromptDocumentFromJson(const json& j) {
  PromptDocument doc;
  doc.base = j.at("base").get<std::string>();
  if (j.contains("base_caption") && !j["base_caption"].is_null()) doc.base_caption = j["base_caption"].get<std::string>();
  for (const auto& t : j.value("turns", json::array())) {
    Turn turn;
    turn.kind = ParseTurnKind(t.at("kind").get<std::string>());
    turn.user_text = t.at("user_text").get<std::string>();
    if (t.contains("caption") && !t["caption"].is_null()) turn.caption = t["caption"].get<std::string>();
    doc.turns.push_back(std::move(turn));
  }
  return doc;
}

json ToJson(const GenerationParams& p) {
  return {{"temperature", p.temperature},
          {"frequency_penalty", p.frequency_penalty},
          {"presence_penalty", p.presence_penalty},
          {"max_completion_tokens", p.max_completion_tokens},
          {"context_limit", p.context_limit},
          {"model", p.model}};
}

GenerationParams GenerationParamsFromJson(const json& j) {
  GenerationParams p;
  p.temperature = j.value("temperature", p.temperature);
  p.frequency_penalty = j.value("frequency_penalty", p.frequency_penalty);
  p.presence_penalty = j.value("presence_penalty", p.presence_penalty);
  p.max_completion_tokens = j.value("max_completion_tokens", p.max_completion_tokens);
  p.context_limit = j.value("context_limit", p.context_limit);
  p.model = j.value("model", p.model);
  return p;
}

json ToJson(const VisualizationMetadata& meta) {
  json j;
  j["title"] = meta.title;
  j["x_label"] = meta.x_label;
  j["y_label"] = meta.y_label;
  j["other_columns"] = meta.other_columns;
  j["x_range"] = ToJson(meta.x_range);
  j["y_range"] = ToJson(meta.y_range);
  if (const auto* reg = std::get_if<RegressionFacts>(&meta.facts)) {
    j["kind"] = "regression";
    json outliers = json::array();
    for (const auto& o : reg->outliers) outliers.push_back({{"label", o.label}, {"direction", ToString(o.direction)}});
    j["regression"] = {{"intercept", reg->intercept},
                       {"slope", reg->slope},
                       {"pearson_r", reg->pearson_r},
                       {"outliers", std::move(outliers)}};
  } else {
    const auto& cl = std::get<ClusterFacts>(meta.facts);
    j["kind"] = "cluster";
    json clusters = json::array();
    for (const auto& c : cl.clusters) clusters.push_back({{"size", c.size}, {"description", c.description}});
    j["cluster"] = {{"entity_noun", cl.entity_noun}, {"clusters", std::move(clusters)}};
  }
  return j;
}

VisualizationMetadata MetadataFromJson(const json& j) {
  VisualizationMetadata meta;
  meta.title = j.at("title").get<std::string>();
  meta.x_label = j.at("x_label").get<std::string>();
  meta.y_label = j.at("y_label").get<std::string>();
  meta.other_columns = j.value("other_columns", std::vector<std::string>{});
  meta.x_range = RangeFromJson(j.at("x_range"));
  meta.y_range = RangeFromJson(j.at("y_range"));
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "regression") {
    const auto& r = j.at("regression");
    RegressionFacts facts;
    facts.intercept = r.at("intercept").get<double>();
    facts.slope = r.at("slope").get<double>();
    facts.pearson_r = r.at("pearson_r").get<double>();
    for (const auto& o : r.value("outliers", json::array())) {
      const auto dir = o.at("direction").get<std::string>();
      facts.outliers.push_back({o.at("label").get<std::string>(), dir == "higher" ? Direction::kHigher : Direction::kLower});
    }
    meta.facts = std::move(facts);
  } else if (kind == "cluster") {
    const auto& c = j.at("cluster");
    ClusterFacts facts;
    facts.entity_noun = c.value("entity_noun", std::string("points"));
    for (const auto& e : c.at("clusters")) {
      facts.clusters.push_back({e.at("size").get<std::size_t>(), e.at("description").get<std::string>()});
    }
    meta.facts = std::move(facts);
  } else {
    throw Error(ErrorCode::kParse, "unknown metadata kind '" + kind + "'");
  }
  return meta;
}

json ToJson(const PromptStyle& style) {
  return {{"dataset_term", style.dataset_term}, {"oxford_other_columns", style.oxford_other_columns}};
}

PromptStyle PromptStyleFromJson(const json& j) {
  PromptStyle style;
  style.dataset_term = j.value("dataset_term", style.dataset_term);
  style.oxford_other_columns = j.value("oxford_other_columns", style.oxford_other_columns);
  return style;
}

}  // namespace vizcap
