#include "vizcap/session.hpp"

#include <cstdio>
#include <ctime>
#include <random>

#include "vizcap/analysis_io.hpp"

namespace vizcap {

using nlohmann::json;

std::string NewSessionId() {
  std::random_device rd;
  std::uniform_int_distribution<unsigned> byte(0, 255);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 16; ++i) {
    const auto b = byte(rd);
    id.push_back(kHex[b >> 4]);
    id.push_back(kHex[b & 0xF]);
  }
  return id;
}

std::string FormatTimestamp(Clock::time_point tp) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms % 1000));
  return buf;
}

Clock::time_point ParseTimestamp(const std::string& text) {
  std::tm tm{};
  int millis = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d.%dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &millis) < 6) {
    throw Error(ErrorCode::kParse, "bad timestamp '" + text + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const std::time_t secs = timegm(&tm);
  return Clock::time_point(std::chrono::seconds(secs)) + std::chrono::milliseconds(millis);
}

Session Session::Start(VisualizationMetadata meta, GenerationParams params, CompletionBackend& backend,
                       const PromptStyle& style) {
  Validate(params);
  Session s;
  s.id_ = NewSessionId();
  s.doc_ = BuildTier1Prompt(meta, style);
  s.meta_ = std::move(meta);
  s.params_ = std::move(params);
  s.backend_kind = backend.kind();
  const auto response = Complete({s.doc_.base, s.params_}, backend);
  s.doc_ = WithBaseCaption(std::move(s.doc_), response.text);
  s.created_at_ = s.updated_at_ = Clock::now();
  return s;
}

const std::string& Session::Generate(CompletionBackend& backend) {
  const auto response = Complete({AssembleRollingPrompt(doc_), params_}, backend);
  doc_ = CompletePendingTurn(std::move(doc_), response.text);
  updated_at_ = Clock::now();
  return *doc_.turns.back().caption;
}

const std::string& Session::Advance(std::string user_text, TurnKind kind, CompletionBackend& backend) {
  PromptDocument next = AppendTurn(doc_, kind, std::move(user_text));
  CheckBudget(next, params_);  // throws before anything is recorded
  doc_ = std::move(next);
  updated_at_ = Clock::now();
  return Generate(backend);
}

const std::string& Session::RetryPending(CompletionBackend& backend) {
  if (!doc_.has_pending_turn()) throw Error(ErrorCode::kValidation, "no pending turn to retry");
  return Generate(backend);
}

void Session::DiscardPending() {
  doc_ = DiscardPendingTurn(std::move(doc_));
  updated_at_ = Clock::now();
}

std::vector<std::string> Session::captions() const {
  std::vector<std::string> out;
  if (doc_.base_caption) out.push_back(*doc_.base_caption);
  for (const auto& t : doc_.turns) {
    if (t.caption) out.push_back(*t.caption);
  }
  return out;
}

const std::string& Session::latest_caption() const {
  for (auto it = doc_.turns.rbegin(); it != doc_.turns.rend(); ++it) {
    if (it->caption) return *it->caption;
  }
  if (!doc_.base_caption) throw Error(ErrorCode::kValidation, "session has no caption yet");
  return *doc_.base_caption;
}

json Session::ToJson() const {
  json j;
  j["version"] = 1;
  j["id"] = id_;
  j["created_at"] = FormatTimestamp(created_at_);
  j["updated_at"] = FormatTimestamp(updated_at_);
  j["backend"] = backend_kind ? json(ToString(*backend_kind)) : json(nullptr);
  j["cassette"] = cassette_path ? json(*cassette_path) : json(nullptr);
  j["tier"] = static_cast<int>(tier());
  j["meta"] = vizcap::ToJson(meta_);
  j["params"] = vizcap::ToJson(params_);
  j["doc"] = vizcap::ToJson(doc_);
  j["captions"] = captions();
  return j;
}

Session Session::FromJson(const json& j) {
  try {
    const int version = j.at("version").get<int>();
    if (version != 1) throw Error(ErrorCode::kParse, "unsupported transcript version " + std::to_string(version));
    Session s;
    s.id_ = j.at("id").get<std::string>();
    s.created_at_ = ParseTimestamp(j.at("created_at").get<std::string>());
    s.updated_at_ = ParseTimestamp(j.at("updated_at").get<std::string>());
    if (j.contains("backend") && !j["backend"].is_null()) s.backend_kind = ParseBackendKind(j["backend"].get<std::string>());
    if (j.contains("cassette") && !j["cassette"].is_null()) s.cassette_path = j["cassette"].get<std::string>();
    s.meta_ = MetadataFromJson(j.at("meta"));
    s.params_ = GenerationParamsFromJson(j.at("params"));
    s.doc_ = PromptDocumentFromJson(j.at("doc"));
    if (s.doc_.base.empty()) throw Error(ErrorCode::kParse, "transcript has an empty base prompt");
    if (!s.doc_.turns.empty() && s.doc_.turns.front().kind != TurnKind::kInstruction) {
      throw Error(ErrorCode::kParse, "transcript's first turn is not an instruction");
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed transcript: ") + e.what(), 0);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("malformed transcript: ") + e.what(), 0);
  }
}

TierLevel CurrentTier(const Session& session) { return session.tier(); }

void SaveTranscript(const Session& session, const std::string& path) {
  WriteTextFile(path, session.ToJson().dump(2) + "\n");
}

Session ParseTranscript(std::string_view text) { return Session::FromJson(ParseJsonText(text, "transcript")); }

Session LoadTranscript(const std::string& path) { return ParseTranscript(ReadTextFile(path)); }

}  // namespace vizcap
