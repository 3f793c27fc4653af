#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "vizcap/config.hpp"
#include "vizcap/error.hpp"

namespace vizcap {
namespace {

TEST(ParseConfig, DefaultsWhenEmpty) {
  const auto c = ParseConfig("");
  EXPECT_EQ(c.backend, BackendKind::kStub);
  EXPECT_EQ(c.api_key_env, "OPENAI_API_KEY");
  EXPECT_EQ(c.params, GenerationParams{});
  EXPECT_EQ(c.listen_port, 8080);
}

TEST(ParseConfig, ReadsEveryKey) {
  const auto c = ParseConfig(R"(# caption workbench
backend = http
endpoint = https://api.example.com/v1/completions
api_key_env = MY_KEY   # trailing comment
timeout_seconds = 15
model = text-curie-001
temperature = 0.7
frequency_penalty = 0.5
presence_penalty = 0.25
max_completion_tokens = 128
context_limit = 4096
prompt_style = compact
listen = 0.0.0.0:9000
transcript_dir = /tmp/transcripts
record_cassette = rec.json
)");
  EXPECT_EQ(c.backend, BackendKind::kHttp);
  EXPECT_EQ(c.endpoint, "https://api.example.com/v1/completions");
  EXPECT_EQ(c.api_key_env, "MY_KEY");
  EXPECT_EQ(c.timeout.count(), 15);
  EXPECT_EQ(c.params.model, "text-curie-001");
  EXPECT_DOUBLE_EQ(c.params.temperature, 0.7);
  EXPECT_DOUBLE_EQ(c.params.frequency_penalty, 0.5);
  EXPECT_DOUBLE_EQ(c.params.presence_penalty, 0.25);
  EXPECT_EQ(c.params.max_completion_tokens, 128);
  EXPECT_EQ(c.params.context_limit, 4096);
  EXPECT_EQ(c.style, PromptStyle::Compact());
  EXPECT_EQ(c.listen_host, "0.0.0.0");
  EXPECT_EQ(c.listen_port, 9000);
  EXPECT_EQ(c.transcript_dir, "/tmp/transcripts");
  EXPECT_EQ(c.record_cassette_path, "rec.json");
  EXPECT_NO_THROW(Validate(c));
}

void ExpectConfigErrorAtLine(const std::string& text, int line) {
  try {
    ParseConfig(text);
    FAIL() << text;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, ErrorsCarryTheLineNumber) {
  ExpectConfigErrorAtLine("backend = stub\ncolour = red\n", 2);
  ExpectConfigErrorAtLine("\n\ntemperature = warm\n", 3);
  ExpectConfigErrorAtLine("just words\n", 1);
  ExpectConfigErrorAtLine("backend = carrier-pigeon\n", 1);
  ExpectConfigErrorAtLine("# ok\nmax_completion_tokens = 12.5\n", 2);
  ExpectConfigErrorAtLine("listen = nowhere\n", 1);
  ExpectConfigErrorAtLine("prompt_style = florid\n", 1);
}

TEST(Validate, BackendRequirements) {
  AppConfig c;
  c.backend = BackendKind::kHttp;
  EXPECT_THROW(Validate(c), Error);
  c.endpoint = "http://localhost/v1/completions";
  EXPECT_NO_THROW(Validate(c));
  c.api_key_env.clear();
  EXPECT_THROW(Validate(c), Error);

  AppConfig r;
  r.backend = BackendKind::kReplay;
  EXPECT_THROW(Validate(r), Error);
  r.cassette_path = "x.json";
  EXPECT_NO_THROW(Validate(r));

  AppConfig p;
  p.params.max_completion_tokens = p.params.context_limit;
  EXPECT_THROW(Validate(p), Error);
  p = {};
  p.params.temperature = -0.1;
  EXPECT_THROW(Validate(p), Error);
  p = {};
  p.timeout = std::chrono::seconds(0);
  EXPECT_THROW(Validate(p), Error);
}

TEST(MakeBackend, BuildsTheConfiguredKind) {
  AppConfig c;
  EXPECT_EQ(MakeBackend(c)->kind(), BackendKind::kStub);
  c.backend = BackendKind::kReplay;
  c.cassette_path = testing::FixturePath("gdp_cassette.json");
  EXPECT_EQ(MakeBackend(c)->kind(), BackendKind::kReplay);
  c.record_cassette_path = "out.json";
  auto rec = MakeBackend(c);
  EXPECT_NE(dynamic_cast<RecordingBackend*>(rec.get()), nullptr);
  c.cassette_path = "/nonexistent/cassette.json";
  c.record_cassette_path.clear();
  EXPECT_THROW(MakeBackend(c), Error);
}

TEST(ApplySetting, OverridesOneKey) {
  AppConfig c;
  ApplySetting(c, " context_limit ", " 1024 ");
  EXPECT_EQ(c.params.context_limit, 1024);
  EXPECT_THROW(ApplySetting(c, "nope", "1"), Error);
}

}  // namespace
}  // namespace vizcap
