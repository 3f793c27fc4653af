#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vizcap/llm.hpp"
#include "vizcap/prompt.hpp"

namespace vizcap {

using Clock = std::chrono::system_clock;

// Live tier-3 state. One writer at a time; callers serialize Advance/Retry on
// a given session (the service rejects a second concurrent writer).
class Session {
 public:
  // Builds the tier-1 prompt and generates caption 0. Gateway and budget
  // errors propagate; no session is created.
  static Session Start(VisualizationMetadata meta, GenerationParams params, CompletionBackend& backend,
                       const PromptStyle& style = {});

  // Appends a turn and generates its caption.
  //  - protocol violations and budget overruns throw without changing state;
  //  - gateway failures leave the turn pending (see Retry/DiscardPending) and rethrow.
  const std::string& Advance(std::string user_text, TurnKind kind, CompletionBackend& backend);
  const std::string& RetryPending(CompletionBackend& backend);
  void DiscardPending();

  const std::string& id() const noexcept { return id_; }
  const VisualizationMetadata& meta() const noexcept { return meta_; }
  const PromptDocument& doc() const noexcept { return doc_; }
  const GenerationParams& params() const noexcept { return params_; }
  TierLevel tier() const { return Tier(doc_); }
  // Caption 0 is the tier-1 caption, then one per completed turn.
  std::vector<std::string> captions() const;
  const std::string& latest_caption() const;
  bool has_pending_turn() const { return doc_.has_pending_turn(); }
  // The prompt sent for the newest generation.
  std::string last_prompt() const { return AssembleRollingPrompt(doc_); }

  Clock::time_point created_at() const noexcept { return created_at_; }
  Clock::time_point updated_at() const noexcept { return updated_at_; }

  std::optional<BackendKind> backend_kind;
  std::optional<std::string> cassette_path;

  // Transcript JSON, schema version 1.
  nlohmann::json ToJson() const;
  static Session FromJson(const nlohmann::json& j);

 private:
  Session() = default;
  const std::string& Generate(CompletionBackend& backend);

  std::string id_;
  VisualizationMetadata meta_;
  PromptDocument doc_;
  GenerationParams params_;
  Clock::time_point created_at_{};
  Clock::time_point updated_at_{};
};

TierLevel CurrentTier(const Session& session);

void SaveTranscript(const Session& session, const std::string& path);
// Throws ParseError with the byte offset (or 0 for schema errors).
Session LoadTranscript(const std::string& path);
Session ParseTranscript(std::string_view text);

// Random 128-bit token in hex.
std::string NewSessionId();

std::string FormatTimestamp(Clock::time_point tp);
Clock::time_point ParseTimestamp(const std::string& text);

}  // namespace vizcap
