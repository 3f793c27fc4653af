#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "vizcap/analysis_io.hpp"
#include "vizcap/error.hpp"
#include "vizcap/session.hpp"

namespace vizcap {
namespace {

VisualizationMetadata Meta(const std::string& name) {
  return MetadataFromAnalysis(LoadAnalysisFile(testing::FixturePath(name + ".analysis.json")));
}

ReplayBackend Replay(const std::string& name) {
  return ReplayBackend(LoadCassette(testing::FixturePath(name + "_cassette.json")));
}

// Fails the next `failures` calls with a network error, then defers to stub.
class FlakyBackend final : public CompletionBackend {
 public:
  explicit FlakyBackend(int failures) : failures_(failures) {}
  BackendKind kind() const override { return BackendKind::kStub; }
  CompletionResponse Generate(const CompletionRequest& req) override {
    ++calls;
    if (failures_ > 0) {
      --failures_;
      throw Error(ErrorCode::kNetwork, "connection reset");
    }
    return stub_.Generate(req);
  }
  int calls = 0;

 private:
  int failures_;
  StubBackend stub_;
};

class ScriptReplay : public ::testing::TestWithParam<const char*> {};

TEST_P(ScriptReplay, EveryCaptionMatchesTheTranscript) {
  const std::string name = GetParam();
  const auto script = testing::LoadScript(name);
  auto replay = Replay(name);
  auto s = Session::Start(Meta(name), {}, replay, script.style);
  EXPECT_EQ(s.doc().base, script.base);
  EXPECT_EQ(s.latest_caption(), script.captions[0]);
  for (std::size_t i = 0; i < script.turns.size(); ++i) {
    const auto& [kind, text] = script.turns[i];
    EXPECT_EQ(s.Advance(text, kind, replay), script.captions[i + 1]) << name << " turn " << i;
  }
  EXPECT_EQ(s.captions(), script.captions);
  EXPECT_EQ(s.tier(), TierLevel::kTemplateInstructionQa);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, ScriptReplay, ::testing::Values("gdp", "store", "mall"));

TEST(Session, TiersAdvanceOneTwoThree) {
  StubBackend stub;
  auto s = Session::Start(Meta("gdp"), {}, stub);
  EXPECT_EQ(s.tier(), TierLevel::kTemplateOnly);
  EXPECT_EQ(CurrentTier(s), TierLevel::kTemplateOnly);
  s.Advance("Explain the trend.", TurnKind::kInstruction, stub);
  EXPECT_EQ(s.tier(), TierLevel::kTemplateInstruction);
  s.Advance("Why?", TurnKind::kQuestion, stub);
  EXPECT_EQ(s.tier(), TierLevel::kTemplateInstructionQa);
  EXPECT_EQ(s.captions().size(), 3u);
}

TEST(Session, QuestionBeforeInstructionIsProtocolError) {
  StubBackend stub;
  auto s = Session::Start(Meta("gdp"), {}, stub);
  try {
    s.Advance("Why?", TurnKind::kQuestion, stub);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTierProtocol);
  }
  EXPECT_TRUE(s.doc().turns.empty());
}

TEST(Session, OverBudgetTurnLeavesHistoryUntouched) {
  StubBackend stub;
  GenerationParams p;
  p.context_limit = 400;
  p.max_completion_tokens = 100;
  auto s = Session::Start(Meta("gdp"), p, stub);
  s.Advance("Explain the trend.", TurnKind::kInstruction, stub);
  const auto before = s.ToJson();
  try {
    s.Advance(std::string(1200, 'q'), TurnKind::kQuestion, stub);
    FAIL();
  } catch (const BudgetExceededError& e) {
    EXPECT_LT(e.report().headroom, 0);
    EXPECT_EQ(e.report().context_limit, 400);
  }
  EXPECT_EQ(s.ToJson(), before);
  EXPECT_FALSE(s.has_pending_turn());
}

TEST(Session, GatewayFailureLeavesTurnPendingThenRetry) {
  FlakyBackend flaky(0);
  auto s = Session::Start(Meta("gdp"), {}, flaky);
  FlakyBackend failing(1);
  EXPECT_THROW(s.Advance("Explain.", TurnKind::kInstruction, failing), Error);
  EXPECT_TRUE(s.has_pending_turn());
  EXPECT_EQ(s.captions().size(), 1u);
  // No new turn while one is pending.
  EXPECT_THROW(s.Advance("Again.", TurnKind::kQuestion, failing), Error);
  const auto& caption = s.RetryPending(failing);
  EXPECT_EQ(caption, StubBackend::CaptionFor(s.last_prompt()));
  EXPECT_FALSE(s.has_pending_turn());
  EXPECT_EQ(s.captions().size(), 2u);
}

TEST(Session, DiscardDropsThePendingTurn) {
  StubBackend stub;
  auto s = Session::Start(Meta("gdp"), {}, stub);
  FlakyBackend failing(5);
  EXPECT_THROW(s.Advance("Explain.", TurnKind::kInstruction, failing), Error);
  s.DiscardPending();
  EXPECT_TRUE(s.doc().turns.empty());
  EXPECT_EQ(s.tier(), TierLevel::kTemplateOnly);
  EXPECT_THROW(s.RetryPending(stub), Error);
}

TEST(Session, StartFailureCreatesNothing) {
  FlakyBackend failing(1);
  EXPECT_THROW(Session::Start(Meta("gdp"), {}, failing), Error);
  GenerationParams bad;
  bad.max_completion_tokens = 4096;
  StubBackend stub;
  EXPECT_THROW(Session::Start(Meta("gdp"), bad, stub), Error);
}

TEST(Transcript, SaveLoadRoundTrip) {
  auto replay = Replay("gdp");
  const auto script = testing::LoadScript("gdp");
  auto s = Session::Start(Meta("gdp"), {}, replay);
  s.Advance(script.turns[0].second, script.turns[0].first, replay);
  s.cassette_path = "gdp_cassette.json";

  const auto path = std::filesystem::temp_directory_path() / "vizcap_transcript_test.json";
  SaveTranscript(s, path.string());
  const auto back = LoadTranscript(path.string());
  EXPECT_EQ(back.id(), s.id());
  EXPECT_EQ(back.doc(), s.doc());
  EXPECT_EQ(back.meta(), s.meta());
  EXPECT_EQ(back.params(), s.params());
  EXPECT_EQ(back.captions(), s.captions());
  EXPECT_EQ(back.cassette_path, s.cassette_path);
  EXPECT_EQ(back.ToJson(), s.ToJson());
  std::filesystem::remove(path);
}

TEST(Transcript, TruncatedFileIsParseError) {
  StubBackend stub;
  const auto text = Session::Start(Meta("gdp"), {}, stub).ToJson().dump(2);
  EXPECT_THROW(ParseTranscript(text.substr(0, text.size() / 2)), ParseError);
  EXPECT_THROW(ParseTranscript("{\"version\": 2}"), ParseError);
  EXPECT_THROW(ParseTranscript("{\"version\": 1}"), ParseError);
}

TEST(Transcript, ApiKeyIsNeverWritten) {
  setenv("VIZCAP_SESSION_TEST_KEY", "sk-very-secret-value", 1);
  HttpBackendConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1/v1/completions";
  cfg.api_key_env = "VIZCAP_SESSION_TEST_KEY";
  HttpBackend http(cfg);
  StubBackend stub;
  auto s = Session::Start(Meta("gdp"), {}, stub);
  s.backend_kind = http.kind();
  const auto text = s.ToJson().dump();
  EXPECT_EQ(text.find("sk-very-secret-value"), std::string::npos);
  unsetenv("VIZCAP_SESSION_TEST_KEY");
}

TEST(Timestamps, RoundTripAtMillisecondPrecision) {
  const auto tp = Clock::time_point(std::chrono::milliseconds(1'700'000'123'456));
  EXPECT_EQ(FormatTimestamp(tp), "2023-11-14T22:15:23.456Z");
  EXPECT_EQ(ParseTimestamp(FormatTimestamp(tp)), tp);
  EXPECT_THROW(ParseTimestamp("yesterday"), Error);
}

TEST(SessionId, HexAndDistinct) {
  const auto a = NewSessionId();
  EXPECT_EQ(a.size(), 32u);
  EXPECT_EQ(a.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_NE(a, NewSessionId());
}

}  // namespace
}  // namespace vizcap
