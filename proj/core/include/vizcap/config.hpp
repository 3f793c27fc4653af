#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "vizcap/llm.hpp"
#include "vizcap/prompt.hpp"

namespace vizcap {

// Config file: one "key = value" per line, '#' starts a comment, blank lines
// ignored. Keys:
//   backend               http | stub | replay          (default stub)
//   endpoint              completions URL               (http)
//   api_key_env           env var holding the API key   (http, default OPENAI_API_KEY)
//   cassette              cassette path                 (replay)
//   record_cassette       write every exchange here     (optional)
//   timeout_seconds       request timeout               (default 60)
//   model, temperature, frequency_penalty, presence_penalty,
//   max_completion_tokens, context_limit               generation defaults
//   prompt_style          standard | compact            (default standard)
//   listen                host:port for serve           (default 127.0.0.1:8080)
//   transcript_dir        directory for service transcripts (optional)
struct AppConfig {
  BackendKind backend = BackendKind::kStub;
  std::string endpoint;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string cassette_path;
  std::string record_cassette_path;
  std::chrono::seconds timeout{60};
  GenerationParams params;
  PromptStyle style;
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::string transcript_dir;
};

// Error(kConfig) with the 1-based line for unknown keys or bad values.
AppConfig ParseConfig(std::string_view text);
AppConfig LoadConfig(const std::string& path);
// Applies one key/value pair (also used for CLI overrides).
void ApplySetting(AppConfig& config, std::string_view key, std::string_view value);
// http needs endpoint + api_key_env; replay needs a cassette path.
void Validate(const AppConfig& config);

// Backend described by the config; wrapped in a RecordingBackend when
// record_cassette is set.
std::shared_ptr<CompletionBackend> MakeBackend(const AppConfig& config);

PromptStyle ParsePromptStyle(std::string_view name);

}  // namespace vizcap
