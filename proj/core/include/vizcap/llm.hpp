#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vizcap/error.hpp"
#include "vizcap/prompt.hpp"

namespace vizcap {

struct CompletionRequest {
  std::string prompt;
  GenerationParams params;
};

enum class BackendKind { kHttp, kStub, kReplay };

std::string_view ToString(BackendKind kind);
BackendKind ParseBackendKind(std::string_view text);

struct CompletionResponse {
  std::string text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  BackendKind backend = BackendKind::kStub;
};

// "sha256:<hex>" over the exact prompt bytes.
std::string PromptDigest(std::string_view prompt);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual BackendKind kind() const = 0;

  // Implementations may assume the request already passed Complete()'s checks.
  virtual CompletionResponse Generate(const CompletionRequest& request) = 0;
};

// Validates the request (non-empty prompt, params, token budget) before the
// backend sees it and rejects empty completions afterwards.
CompletionResponse Complete(const CompletionRequest& request, CompletionBackend& backend);

// Deterministic phrasebook text chosen from the prompt digest. The digest
// prefix is appended so distinct prompts always give distinct text.
class StubBackend final : public CompletionBackend {
 public:
  BackendKind kind() const override { return BackendKind::kStub; }
  CompletionResponse Generate(const CompletionRequest& request) override;

  static std::string CaptionFor(std::string_view prompt);
};

enum class CassetteMode { kRecord, kReplay };

struct CassetteEntry {
  std::string prompt_digest;
  std::string prompt;
  std::string completion;
  friend bool operator==(const CassetteEntry&, const CassetteEntry&) = default;
};

struct Cassette {
  CassetteMode mode = CassetteMode::kRecord;
  std::vector<CassetteEntry> entries;

  const CassetteEntry* Find(std::string_view digest) const;
};

// Appends (digest, prompt, completion). A replay-mode cassette raises Error(kMode).
Cassette Record(Cassette cassette, const CompletionRequest& request, const CompletionResponse& response);

// File format: {"version": 1, "entries": [{"prompt_digest","prompt","completion"}]}.
// Digests in the file are recomputed and must match the prompt text.
nlohmann::json ToJson(const Cassette& cassette);
Cassette CassetteFromJson(const nlohmann::json& j, CassetteMode mode);
Cassette LoadCassette(const std::string& path, CassetteMode mode = CassetteMode::kReplay);
void SaveCassette(const Cassette& cassette, const std::string& path);

class ReplayMissError : public Error {
 public:
  ReplayMissError(std::string digest, std::string closest_prompt);
  const std::string& digest() const noexcept { return digest_; }
  const std::string& closest_prompt() const noexcept { return closest_prompt_; }

 private:
  std::string digest_;
  std::string closest_prompt_;
};

class ReplayBackend final : public CompletionBackend {
 public:
  explicit ReplayBackend(Cassette cassette);
  BackendKind kind() const override { return BackendKind::kReplay; }
  CompletionResponse Generate(const CompletionRequest& request) override;

  const Cassette& cassette() const noexcept { return cassette_; }

 private:
  Cassette cassette_;
};

// Forwards to another backend and appends every exchange to a record-mode
// cassette. Appends are serialized; Snapshot() copies the cassette so far.
class RecordingBackend final : public CompletionBackend {
 public:
  explicit RecordingBackend(std::shared_ptr<CompletionBackend> inner);
  BackendKind kind() const override { return inner_->kind(); }
  CompletionResponse Generate(const CompletionRequest& request) override;

  Cassette Snapshot() const;

 private:
  std::shared_ptr<CompletionBackend> inner_;
  mutable std::mutex mu_;
  Cassette cassette_;
};

struct HttpBackendConfig {
  // Full URL of the completions endpoint, e.g. https://api.openai.com/v1/completions.
  std::string endpoint;
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::seconds timeout{60};
  int retries_on_network_error = 1;
};

// OpenAI-style text completions over HTTP(S). The API key is read from the
// named environment variable at request time.
class HttpBackend final : public CompletionBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  BackendKind kind() const override { return BackendKind::kHttp; }
  CompletionResponse Generate(const CompletionRequest& request) override;

  // JSON body sent for a request.
  static nlohmann::json RequestBody(const CompletionRequest& request);

 private:
  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

}  // namespace vizcap
