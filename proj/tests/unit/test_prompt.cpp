#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "vizcap/analysis_io.hpp"
#include "vizcap/error.hpp"
#include "vizcap/prompt.hpp"

namespace vizcap {
namespace {

using testing::LoadScript;

VisualizationMetadata GdpMeta() {
  VisualizationMetadata m;
  m.title = "GDP per capita VS Healthy life expectancy";
  m.x_label = "GDP per capita";
  m.y_label = "Healthy life expectancy";
  m.other_columns = {"Social support", "Perceptions of corruption", "Generosity", "Overall rank", "Score",
                     "Country or region", "Freedom to make life choices"};
  m.x_range = {0.0, 1.684, false};
  m.y_range = {0.0, 1.141, false};
  m.facts = RegressionFacts{0.27, 0.51, 0.84, {{"Swaziland", Direction::kLower}}};
  return m;
}

VisualizationMetadata StoreMeta() {
  VisualizationMetadata m;
  m.title = "Store Area VS Items Available";
  m.x_label = "Store Area";
  m.y_label = "Items Available";
  m.other_columns = {"Daily Customer Count", "Store Sales", "Store ID"};
  m.x_range = {775, 2229, true};
  m.y_range = {932, 2667, true};
  m.facts = RegressionFacts{3.97, 1.2, 1.0, {}};
  return m;
}

VisualizationMetadata MallMeta() {
  VisualizationMetadata m;
  m.title = "Annual Income (k$) VS Spending Score (1-100)";
  m.x_label = "Annual Income (k$)";
  m.y_label = "Spending Score (1-100)";
  m.other_columns = {"Age", "CustomerID", "Gender"};
  m.x_range = {15, 137, true};
  m.y_range = {1, 99, true};
  m.facts = ClusterFacts{{{92, "average income and average spending score"},
                          {30, "low income and low spending score"},
                          {28, "low income and high spending score"},
                          {26, "high income and low spending score"},
                          {24, "high income and high spending score"}},
                         "customers"};
  return m;
}

TEST(FormatQuantity, Examples) {
  EXPECT_EQ(FormatQuantity(1.0, QuantityRole::kCoefficient), "1.0");
  EXPECT_EQ(FormatQuantity(1.2, QuantityRole::kCoefficient), "1.2");
  EXPECT_EQ(FormatQuantity(0.2669, QuantityRole::kCoefficient), "0.27");
  EXPECT_EQ(FormatQuantity(-0.001, QuantityRole::kCoefficient), "0.0");
  EXPECT_EQ(FormatQuantity(775, QuantityRole::kRangeEndpoint), "775");
  EXPECT_EQ(FormatQuantity(1.684, QuantityRole::kRangeEndpoint), "1.684");
  EXPECT_EQ(FormatQuantity(0.0, QuantityRole::kRealRangeEndpoint), "0.0");
  EXPECT_EQ(FormatQuantity(1.5, QuantityRole::kRealRangeEndpoint), "1.5");
}

TEST(JoinList, OxfordAndPlain) {
  EXPECT_EQ(JoinList({"A"}, true), "A");
  EXPECT_EQ(JoinList({"A", "B"}, true), "A and B");
  EXPECT_EQ(JoinList({"A", "B", "C"}, true), "A, B, and C");
  EXPECT_EQ(JoinList({"A", "B", "C"}, false), "A, B, C");
  EXPECT_EQ(JoinList({}, true), "");
}

TEST(BuildTier1Prompt, GdpIsByteExact) {
  EXPECT_EQ(BuildTier1Prompt(GdpMeta()).base, LoadScript("gdp").base);
}

TEST(BuildTier1Prompt, StoreHasNoOutlierSentence) {
  const auto text = BuildTier1Prompt(StoreMeta(), PromptStyle::Compact()).base;
  EXPECT_EQ(text, LoadScript("store").base);
  EXPECT_EQ(text.find("Outliers"), std::string::npos);
  EXPECT_TRUE(text.ends_with("The correlation coefficient is 1.0."));
}

TEST(BuildTier1Prompt, MallIsByteExact) {
  EXPECT_EQ(BuildTier1Prompt(MallMeta(), PromptStyle::Compact()).base, LoadScript("mall").base);
}

TEST(BuildTier1Prompt, FixtureAnalysesGiveSameText) {
  EXPECT_EQ(MetadataFromAnalysis(LoadAnalysisFile(testing::FixturePath("gdp.analysis.json"))), GdpMeta());
  EXPECT_EQ(MetadataFromAnalysis(LoadAnalysisFile(testing::FixturePath("store.analysis.json"))), StoreMeta());
  EXPECT_EQ(MetadataFromAnalysis(LoadAnalysisFile(testing::FixturePath("mall.analysis.json"))), MallMeta());
}

TEST(BuildTier1Prompt, StandardStyleUsesDataSetWithOxfordJoin) {
  const auto text = BuildTier1Prompt(StoreMeta()).base;
  EXPECT_NE(text.find("from the data set include Daily Customer Count, Store Sales, and Store ID."),
            std::string::npos);
}

TEST(BuildTier1Prompt, OutlierSentenceIffConfirmed) {
  auto m = GdpMeta();
  EXPECT_NE(BuildTier1Prompt(m).base.find("Outliers found are"), std::string::npos);
  std::get<RegressionFacts>(m.facts).outliers.clear();
  EXPECT_EQ(BuildTier1Prompt(m).base.find("Outliers found are"), std::string::npos);
  std::get<RegressionFacts>(m.facts).outliers = {{"A", Direction::kHigher}, {"B", Direction::kLower}};
  EXPECT_TRUE(BuildTier1Prompt(m).base.ends_with(
      " Outliers found are A which had a higher healthy life expectancy than would be expected of its GDP per "
      "capita, and B which had a lower healthy life expectancy than would be expected of its GDP per capita."));
}

TEST(BuildTier1Prompt, SingleClusterHasNoOthersSentence) {
  auto m = MallMeta();
  std::get<ClusterFacts>(m.facts).clusters.resize(1);
  const auto text = BuildTier1Prompt(m).base;
  EXPECT_EQ(text.find("Other clusters"), std::string::npos);
  EXPECT_TRUE(text.ends_with("The number of clusters is 1. The largest cluster has 92 customers with average "
                             "income and average spending score."));
  std::get<ClusterFacts>(m.facts).clusters.clear();
  try {
    BuildTier1Prompt(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBuild);
  }
}

TEST(BuildTier1Prompt, DeterministicAndInjective) {
  std::set<std::string> seen;
  std::vector<VisualizationMetadata> variants = {GdpMeta(), StoreMeta(), MallMeta()};
  auto m = GdpMeta();
  m.title += "!";
  variants.push_back(m);
  m = GdpMeta();
  std::get<RegressionFacts>(m.facts).slope = 0.52;
  variants.push_back(m);
  m = GdpMeta();
  m.y_range.max = 1.2;
  variants.push_back(m);
  for (const auto& v : variants) {
    EXPECT_EQ(BuildTier1Prompt(v).base, BuildTier1Prompt(v).base);
    seen.insert(BuildTier1Prompt(v).base);
  }
  EXPECT_EQ(seen.size(), variants.size());
}

TEST(AppendTurn, ProtocolRules) {
  auto doc = WithBaseCaption(BuildTier1Prompt(GdpMeta()), "c0");
  EXPECT_EQ(Tier(doc), TierLevel::kTemplateOnly);
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code([&] { AppendTurn(doc, TurnKind::kQuestion, "why?"); }), ErrorCode::kTierProtocol);
  EXPECT_EQ(code([&] { AppendInstruction(doc, "  "); }), ErrorCode::kValidation);

  const auto script = LoadScript("gdp");
  auto t2 = AppendInstruction(doc, script.turns[0].second);
  EXPECT_EQ(Tier(t2), TierLevel::kTemplateInstruction);
  EXPECT_EQ(code([&] { AppendTurn(t2, TurnKind::kQuestion, "q"); }), ErrorCode::kTierProtocol);  // pending
  t2 = CompletePendingTurn(t2, "c1");
  EXPECT_EQ(code([&] { AppendInstruction(t2, "again"); }), ErrorCode::kTierProtocol);
  const auto t3 = AppendTurn(t2, TurnKind::kEdit, "shorter");
  EXPECT_EQ(Tier(t3), TierLevel::kTemplateInstructionQa);
  EXPECT_EQ(Tier(DiscardPendingTurn(t3)), TierLevel::kTemplateInstruction);
  // Inputs are left untouched.
  EXPECT_EQ(doc.turns.size(), 0u);
  EXPECT_EQ(t2.turns.size(), 1u);
}

TEST(Tier, ConstructedDocs) {
  PromptDocument d{"b", "c", {}};
  EXPECT_EQ(Tier(d), TierLevel::kTemplateOnly);
  d.turns = {{TurnKind::kInstruction, "i", "c1"}};
  EXPECT_EQ(Tier(d), TierLevel::kTemplateInstruction);
  d.turns.push_back({TurnKind::kQuestion, "q", "c2"});
  d.turns.push_back({TurnKind::kEdit, "e", "c3"});
  EXPECT_EQ(Tier(d), TierLevel::kTemplateInstructionQa);
}

TEST(AssembleRollingPrompt, Shapes) {
  PromptDocument d{"base", "caption1", {}};
  EXPECT_EQ(AssembleRollingPrompt(d), "base");
  d.turns = {{TurnKind::kInstruction, "instruction", std::nullopt}};
  EXPECT_EQ(AssembleRollingPrompt(d), "base\n\ncaption1\n\ninstruction");
  d.turns[0].caption = "c2";
  d.turns.push_back({TurnKind::kQuestion, "q?", std::nullopt});
  EXPECT_EQ(AssembleRollingPrompt(d), "base\n\ncaption1\n\ninstruction\n\nc2\n\nq?");
}

TEST(AssembleRollingPrompt, MatchesGdpCassettePrompts) {
  const auto script = LoadScript("gdp");
  const auto cassette = nlohmann::json::parse(testing::ReadFixture("gdp_cassette.json"));
  auto doc = WithBaseCaption(BuildTier1Prompt(GdpMeta()), script.captions[0]);
  EXPECT_EQ(doc.base, cassette["entries"][0]["prompt"]);
  for (std::size_t k = 0; k < script.turns.size(); ++k) {
    doc = AppendTurn(doc, script.turns[k].first, script.turns[k].second);
    const auto prompt = AssembleRollingPrompt(doc);
    EXPECT_EQ(prompt, cassette["entries"][k + 1]["prompt"]);
    EXPECT_TRUE(prompt.starts_with(doc.base));
    EXPECT_TRUE(prompt.ends_with(script.turns[k].second));
    doc = CompletePendingTurn(doc, script.captions[k + 1]);
  }
}

TEST(EstimateTokens, CharsOverFour) {
  EXPECT_EQ(EstimateTokens(""), 0u);
  EXPECT_EQ(EstimateTokens("abcd"), 1u);
  EXPECT_EQ(EstimateTokens(std::string(101, 'x')), 26u);
  EXPECT_EQ(EstimateTokens("\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9"), 2u);  // 5 code points
}

TEST(CheckBudget, Arithmetic) {
  GenerationParams p;  // 256 / 2048
  EXPECT_TRUE(MeasureBudget(std::string(100, 'a'), p).ok());
  EXPECT_EQ(MeasureBudget(std::string(100, 'a'), p).prompt_tokens, 25u);
  EXPECT_FALSE(MeasureBudget(std::string(8000, 'a'), p).ok());
  EXPECT_THROW(CheckPromptBudget(std::string(8000, 'a'), p), BudgetExceededError);
  // Boundary: 1792 prompt tokens + 256 = 2048.
  const auto edge = MeasureBudget(std::string(1792 * 4, 'a'), p);
  EXPECT_TRUE(edge.ok());
  EXPECT_EQ(edge.headroom, 0);
  EXPECT_FALSE(MeasureBudget(std::string(1792 * 4 + 1, 'a'), p).ok());
  try {
    CheckPromptBudget(std::string(8000, 'a'), p);
  } catch (const BudgetExceededError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
    EXPECT_EQ(e.report().prompt_tokens, 2000u);
    EXPECT_EQ(e.report().headroom, 2048 - 2000 - 256);
  }
}

TEST(GenerationParams, Validation) {
  GenerationParams p;
  EXPECT_NO_THROW(Validate(p));
  p.temperature = -0.1;
  EXPECT_THROW(Validate(p), Error);
  p = {};
  p.max_completion_tokens = 2048;
  EXPECT_THROW(Validate(p), Error);
  p = {};
  p.max_completion_tokens = 0;
  EXPECT_THROW(Validate(p), Error);
}

TEST(PromptJson, RoundTrips) {
  auto doc = AppendTurn(WithBaseCaption(BuildTier1Prompt(MallMeta()), "c0"), TurnKind::kInstruction, "i");
  EXPECT_EQ(PromptDocumentFromJson(ToJson(doc)), doc);
  EXPECT_EQ(MetadataFromJson(ToJson(MallMeta())), MallMeta());
  EXPECT_EQ(MetadataFromJson(ToJson(GdpMeta())), GdpMeta());
  GenerationParams p;
  p.temperature = 0.7;
  p.model = "m";
  EXPECT_EQ(GenerationParamsFromJson(ToJson(p)), p);
  EXPECT_EQ(PromptStyleFromJson(ToJson(PromptStyle::Compact())), PromptStyle::Compact());
}

}  // namespace
}  // namespace vizcap
