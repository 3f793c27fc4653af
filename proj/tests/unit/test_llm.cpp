#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <thread>

#include "fixtures.hpp"
#include "vizcap/error.hpp"
#include "vizcap/llm.hpp"

namespace vizcap {
namespace {

// Counts calls and answers with a fixed text.
class CountingBackend final : public CompletionBackend {
 public:
  explicit CountingBackend(std::string text = "ok") : text_(std::move(text)) {}
  BackendKind kind() const override { return BackendKind::kStub; }
  CompletionResponse Generate(const CompletionRequest&) override {
    ++calls;
    return {text_, 0, 0, BackendKind::kStub};
  }
  int calls = 0;

 private:
  std::string text_;
};

TEST(PromptDigest, Sha256OfBytes) {
  // Known SHA-256 of "abc".
  EXPECT_EQ(PromptDigest("abc"), "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_NE(PromptDigest("abc"), PromptDigest("abd"));
}

TEST(StubBackend, SamePromptThreeTimesIsIdentical) {
  StubBackend stub;
  const CompletionRequest req{"Generate an engaging caption for a scatter plot", {}};
  const auto a = Complete(req, stub).text;
  EXPECT_EQ(Complete(req, stub).text, a);
  EXPECT_EQ(Complete(req, stub).text, a);
  EXPECT_FALSE(a.empty());
}

TEST(StubBackend, DistinctPromptsGiveDistinctText) {
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) seen.insert(StubBackend::CaptionFor("prompt " + std::to_string(i)));
  EXPECT_EQ(seen.size(), 200u);
}

TEST(Complete, RejectsEmptyPromptAndOverBudgetBeforeBackend) {
  CountingBackend counting;
  EXPECT_THROW(Complete({"", {}}, counting), Error);
  EXPECT_THROW(Complete({std::string(8000, 'x'), {}}, counting), BudgetExceededError);
  EXPECT_EQ(counting.calls, 0);
  EXPECT_EQ(Complete({"fine", {}}, counting).text, "ok");
  EXPECT_EQ(counting.calls, 1);
}

TEST(Complete, BlankCompletionIsError) {
  CountingBackend blank("  \n");
  try {
    Complete({"p", {}}, blank);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCompletion);
  }
}

TEST(Complete, FillsTokenCountsWhenBackendDoesNot) {
  CountingBackend b("abcdefgh");
  const auto r = Complete({"abcd", {}}, b);
  EXPECT_EQ(r.prompt_tokens, 1u);
  EXPECT_EQ(r.completion_tokens, 2u);
}

TEST(Cassette, RecordThenReplay) {
  Cassette c;
  const CompletionRequest a{"first", {}}, b{"second", {}};
  c = Record(c, a, {"one", 0, 0, BackendKind::kStub});
  c = Record(c, b, {"two", 0, 0, BackendKind::kStub});
  ASSERT_EQ(c.entries.size(), 2u);
  EXPECT_NE(c.entries[0].prompt_digest, c.entries[1].prompt_digest);

  const auto path = std::filesystem::temp_directory_path() / "vizcap_cassette_test.json";
  SaveCassette(c, path.string());
  ReplayBackend replay(LoadCassette(path.string()));
  EXPECT_EQ(Complete(a, replay).text, "one");
  EXPECT_EQ(Complete(b, replay).text, "two");
  std::filesystem::remove(path);
}

TEST(Cassette, RecordInReplayModeIsModeError) {
  Cassette c;
  c.mode = CassetteMode::kReplay;
  try {
    Record(c, {"p", {}}, {"t", 0, 0, BackendKind::kStub});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMode);
  }
}

TEST(Cassette, TamperedDigestRejected) {
  auto j = nlohmann::json::parse(testing::ReadFixture("gdp_cassette.json"));
  j["entries"][0]["prompt"] = "changed";
  EXPECT_THROW(CassetteFromJson(j, CassetteMode::kReplay), Error);
}

TEST(ReplayBackend, GdpTier1Caption) {
  ReplayBackend replay(LoadCassette(testing::FixturePath("gdp_cassette.json")));
  const auto script = testing::LoadScript("gdp");
  EXPECT_EQ(Complete({script.base, {}}, replay).text,
            "The higher the GDP per capita, the higher the healthy life expectancy!");
}

TEST(ReplayBackend, MissReportsClosestPrompt) {
  ReplayBackend replay(LoadCassette(testing::FixturePath("gdp_cassette.json")));
  try {
    Complete({"Generate an engaging caption for something else", {}}, replay);
    FAIL();
  } catch (const ReplayMissError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kReplayMiss);
    EXPECT_EQ(e.digest(), PromptDigest("Generate an engaging caption for something else"));
    EXPECT_TRUE(e.closest_prompt().starts_with("Generate an engaging caption for a scatter plot"));
  }
}

TEST(RecordingBackend, RecordsEveryExchange) {
  auto inner = std::make_shared<StubBackend>();
  RecordingBackend rec(inner);
  Complete({"a", {}}, rec);
  Complete({"b", {}}, rec);
  const auto snap = rec.Snapshot();
  ASSERT_EQ(snap.entries.size(), 2u);
  ReplayBackend replay(snap);
  EXPECT_EQ(Complete({"b", {}}, replay).text, StubBackend::CaptionFor("b"));
}

// ---------------------------------------------------------------------------
// HttpBackend against a local server.

class FakeCompletions : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      last_auth_ = req.get_header_value("Authorization");
      last_body_ = req.body;
      if (status_ != 200) {
        res.status = status_;
        res.set_content("{\"error\":\"x\"}", "application/json");
        return;
      }
      res.set_content(R"({"choices":[{"text":"A caption."}],"usage":{"prompt_tokens":7,"completion_tokens":3}})",
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    setenv("VIZCAP_TEST_KEY", "sk-test", 1);
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
    unsetenv("VIZCAP_TEST_KEY");
  }
  HttpBackend Backend() {
    HttpBackendConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/completions";
    c.api_key_env = "VIZCAP_TEST_KEY";
    c.timeout = std::chrono::seconds(5);
    return HttpBackend(c);
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::atomic<int> status_{200};
  std::string last_auth_;
  std::string last_body_;
};

TEST_F(FakeCompletions, SendsParamsAndBearerKey) {
  auto b = Backend();
  GenerationParams p;
  p.max_completion_tokens = 64;
  const auto r = Complete({"hello", p}, b);
  EXPECT_EQ(r.text, "A caption.");
  EXPECT_EQ(r.prompt_tokens, 7u);
  EXPECT_EQ(last_auth_, "Bearer sk-test");
  const auto body = nlohmann::json::parse(last_body_);
  EXPECT_EQ(body["prompt"], "hello");
  EXPECT_EQ(body["max_tokens"], 64);
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["model"], "text-davinci-002");
}

TEST_F(FakeCompletions, UnauthorizedIsAuthErrorWithoutRetry) {
  status_ = 401;
  auto b = Backend();
  try {
    Complete({"hello", {}}, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAuth);
  }
  EXPECT_EQ(hits_, 1);
}

TEST_F(FakeCompletions, ClientErrorIsNotRetried) {
  status_ = 400;
  auto b = Backend();
  try {
    Complete({"hello", {}}, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackend);
  }
  EXPECT_EQ(hits_, 1);
}

TEST_F(FakeCompletions, ServerErrorRetriedOnceThenNetworkError) {
  status_ = 503;
  auto b = Backend();
  try {
    Complete({"hello", {}}, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNetwork);
  }
  EXPECT_EQ(hits_, 2);
}

TEST_F(FakeCompletions, MissingKeyIsAuthError) {
  unsetenv("VIZCAP_TEST_KEY");
  auto b = Backend();
  try {
    Complete({"hello", {}}, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAuth);
  }
  EXPECT_EQ(hits_, 0);
}

TEST(HttpBackend, UnreachableHostIsNetworkError) {
  HttpBackendConfig c;
  c.endpoint = "http://127.0.0.1:1/v1/completions";
  c.api_key_env = "";
  c.timeout = std::chrono::seconds(2);
  HttpBackend b(c);
  try {
    Complete({"hello", {}}, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNetwork);
    EXPECT_TRUE(IsGatewayError(e.code()));
  }
}

TEST(HttpBackend, BadEndpointIsConfigError) {
  HttpBackendConfig c;
  c.endpoint = "ftp://x";
  EXPECT_THROW(HttpBackend{c}, Error);
}

}  // namespace
}  // namespace vizcap
