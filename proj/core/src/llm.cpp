#include "vizcap/llm.hpp"

#include <openssl/evp.h>

#include <array>

#include "vizcap/analysis_io.hpp"

namespace vizcap {

using nlohmann::json;

std::string_view ToString(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHttp: return "http";
    case BackendKind::kStub: return "stub";
    case BackendKind::kReplay: return "replay";
  }
  return "stub";
}

BackendKind ParseBackendKind(std::string_view text) {
  if (text == "http") return BackendKind::kHttp;
  if (text == "stub") return BackendKind::kStub;
  if (text == "replay") return BackendKind::kReplay;
  throw Error(ErrorCode::kConfig, "unknown backend '" + std::string(text) + "' (expected http|stub|replay)");
}

std::string PromptDigest(std::string_view prompt) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(prompt.data(), prompt.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kBackend, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  out.reserve(7 + 2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

CompletionResponse Complete(const CompletionRequest& request, CompletionBackend& backend) {
  if (request.prompt.empty()) throw Error(ErrorCode::kValidation, "completion prompt is empty");
  const auto budget = CheckPromptBudget(request.prompt, request.params);
  CompletionResponse response = backend.Generate(request);
  if (response.text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kEmptyCompletion, "backend '" + std::string(ToString(backend.kind())) +
                                                 "' returned an empty completion");
  }
  if (response.prompt_tokens == 0) response.prompt_tokens = budget.prompt_tokens;
  if (response.completion_tokens == 0) response.completion_tokens = EstimateTokens(response.text);
  return response;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 8> kOpeners = {
    "Look closer:", "Here is the story:", "At a glance,", "The numbers speak:",
    "Surprise!", "It turns out", "Plot twist:", "Guess what?",
};
constexpr std::array<std::string_view, 8> kMiddles = {
    "the trend climbs steadily across the chart",
    "every point has a tale to tell",
    "the pattern is clearer than you might expect",
    "a few points refuse to follow the crowd",
    "the data lines up in a telling way",
    "the spread hides a simple relationship",
    "the groups practically sort themselves",
    "one relationship dominates the picture",
};
constexpr std::array<std::string_view, 8> kClosers = {
    "and that is worth a second look!", "so keep an eye on the outliers.",
    "which says a lot about the data.", "and the chart makes it obvious.",
    "proving numbers can be exciting.", "so the story writes itself.",
    "and nobody saw it coming.", "which is good news for curious readers.",
};

int HexNibble(char c) { return c <= '9' ? c - '0' : c - 'a' + 10; }

}  // namespace

std::string StubBackend::CaptionFor(std::string_view prompt) {
  const std::string digest = PromptDigest(prompt);
  const std::string_view hex = std::string_view(digest).substr(7);
  const auto pick = [&](std::size_t pos, std::size_t modulo) {
    return static_cast<std::size_t>(HexNibble(hex[pos]) * 16 + HexNibble(hex[pos + 1])) % modulo;
  };
  std::string text;
  text += kOpeners[pick(0, kOpeners.size())];
  text += ' ';
  text += kMiddles[pick(2, kMiddles.size())];
  text += ' ';
  text += kClosers[pick(4, kClosers.size())];
  text += " [stub ";
  text += hex.substr(0, 12);
  text += ']';
  return text;
}

CompletionResponse StubBackend::Generate(const CompletionRequest& request) {
  CompletionResponse response;
  response.text = CaptionFor(request.prompt);
  response.backend = BackendKind::kStub;
  return response;
}

// ---------------------------------------------------------------------------

const CassetteEntry* Cassette::Find(std::string_view digest) const {
  for (const auto& e : entries) {
    if (e.prompt_digest == digest) return &e;
  }
  return nullptr;
}

Cassette Record(Cassette cassette, const CompletionRequest& request, const CompletionResponse& response) {
  if (cassette.mode != CassetteMode::kRecord) {
    throw Error(ErrorCode::kMode, "cannot record into a replay-mode cassette");
  }
  cassette.entries.push_back({PromptDigest(request.prompt), request.prompt, response.text});
  return cassette;
}

json ToJson(const Cassette& cassette) {
  json entries = json::array();
  for (const auto& e : cassette.entries) {
    entries.push_back({{"prompt_digest", e.prompt_digest}, {"prompt", e.prompt}, {"completion", e.completion}});
  }
  return {{"version", 1}, {"entries", std::move(entries)}};
}

Cassette CassetteFromJson(const json& j, CassetteMode mode) {
  Cassette cassette;
  cassette.mode = mode;
  try {
    const json& entries = j.is_array() ? j : j.at("entries");
    for (const auto& e : entries) {
      CassetteEntry entry;
      entry.prompt = e.at("prompt").get<std::string>();
      entry.completion = e.at("completion").get<std::string>();
      entry.prompt_digest = PromptDigest(entry.prompt);
      if (e.contains("prompt_digest") && e["prompt_digest"].get<std::string>() != entry.prompt_digest) {
        throw Error(ErrorCode::kParse, "cassette entry " + std::to_string(cassette.entries.size()) +
                                           " digest does not match its prompt");
      }
      cassette.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed cassette: ") + e.what(), 0);
  }
  return cassette;
}

Cassette LoadCassette(const std::string& path, CassetteMode mode) {
  return CassetteFromJson(ParseJsonText(ReadTextFile(path), "cassette '" + path + "'"), mode);
}

void SaveCassette(const Cassette& cassette, const std::string& path) {
  WriteTextFile(path, ToJson(cassette).dump(2) + "\n");
}

// ---------------------------------------------------------------------------

ReplayMissError::ReplayMissError(std::string digest, std::string closest_prompt)
    : Error(ErrorCode::kReplayMiss,
            "no cassette entry for prompt " + digest +
                (closest_prompt.empty() ? std::string(" (cassette is empty)")
                                        : "; closest recorded prompt starts: \"" + closest_prompt.substr(0, 120) + "\"")),
      digest_(std::move(digest)),
      closest_prompt_(std::move(closest_prompt)) {}

ReplayBackend::ReplayBackend(Cassette cassette) : cassette_(std::move(cassette)) {
  cassette_.mode = CassetteMode::kReplay;
}

CompletionResponse ReplayBackend::Generate(const CompletionRequest& request) {
  const std::string digest = PromptDigest(request.prompt);
  if (const auto* entry = cassette_.Find(digest)) {
    CompletionResponse response;
    response.text = entry->completion;
    response.backend = BackendKind::kReplay;
    return response;
  }
  // Closest = longest shared prefix with the requested prompt.
  const CassetteEntry* best = nullptr;
  std::size_t best_len = 0;
  for (const auto& e : cassette_.entries) {
    std::size_t len = 0;
    while (len < e.prompt.size() && len < request.prompt.size() && e.prompt[len] == request.prompt[len]) ++len;
    if (!best || len > best_len) {
      best = &e;
      best_len = len;
    }
  }
  throw ReplayMissError(digest, best ? best->prompt : std::string{});
}

RecordingBackend::RecordingBackend(std::shared_ptr<CompletionBackend> inner) : inner_(std::move(inner)) {
  if (!inner_) throw Error(ErrorCode::kConfig, "recording backend needs an inner backend");
}

CompletionResponse RecordingBackend::Generate(const CompletionRequest& request) {
  CompletionResponse response = inner_->Generate(request);
  if (response.text.find_first_not_of(" \t\r\n") == std::string::npos) return response;
  std::lock_guard lock(mu_);
  cassette_ = Record(std::move(cassette_), request, response);
  return response;
}

Cassette RecordingBackend::Snapshot() const {
  std::lock_guard lock(mu_);
  return cassette_;
}

}  // namespace vizcap
