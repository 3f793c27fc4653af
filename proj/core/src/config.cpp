#include "vizcap/config.hpp"

#include <charconv>
#include <sstream>

#include "vizcap/analysis_io.hpp"

namespace vizcap {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double ToDouble(std::string_view key, std::string_view value) {
  const auto parsed = ParseNumber(value);
  if (!parsed) throw Error(ErrorCode::kConfig, std::string(key) + ": '" + std::string(value) + "' is not a number");
  return *parsed;
}

int ToInt(std::string_view key, std::string_view value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::kConfig, std::string(key) + ": '" + std::string(value) + "' is not an integer");
  }
  return out;
}

}  // namespace

PromptStyle ParsePromptStyle(std::string_view name) {
  if (name == "standard") return PromptStyle::Standard();
  if (name == "compact") return PromptStyle::Compact();
  throw Error(ErrorCode::kConfig, "unknown prompt style '" + std::string(name) + "' (expected standard|compact)");
}

void ApplySetting(AppConfig& config, std::string_view key, std::string_view value) {
  key = Trim(key);
  value = Trim(value);
  if (key == "backend") {
    config.backend = ParseBackendKind(value);
  } else if (key == "endpoint") {
    config.endpoint = value;
  } else if (key == "api_key_env") {
    config.api_key_env = value;
  } else if (key == "cassette") {
    config.cassette_path = value;
  } else if (key == "record_cassette") {
    config.record_cassette_path = value;
  } else if (key == "timeout_seconds") {
    config.timeout = std::chrono::seconds(ToInt(key, value));
  } else if (key == "model") {
    config.params.model = value;
  } else if (key == "temperature") {
    config.params.temperature = ToDouble(key, value);
  } else if (key == "frequency_penalty") {
    config.params.frequency_penalty = ToDouble(key, value);
  } else if (key == "presence_penalty") {
    config.params.presence_penalty = ToDouble(key, value);
  } else if (key == "max_completion_tokens") {
    config.params.max_completion_tokens = ToInt(key, value);
  } else if (key == "context_limit") {
    config.params.context_limit = ToInt(key, value);
  } else if (key == "prompt_style") {
    config.style = ParsePromptStyle(value);
  } else if (key == "listen") {
    const auto colon = value.rfind(':');
    if (colon == std::string_view::npos) throw Error(ErrorCode::kConfig, "listen must be host:port");
    config.listen_host = value.substr(0, colon);
    config.listen_port = ToInt(key, value.substr(colon + 1));
  } else if (key == "transcript_dir") {
    config.transcript_dir = value;
  } else {
    throw Error(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
  }
}

AppConfig ParseConfig(std::string_view text) {
  AppConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = Trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      ApplySetting(config, view.substr(0, eq), view.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

AppConfig LoadConfig(const std::string& path) { return ParseConfig(ReadTextFile(path)); }

void Validate(const AppConfig& config) {
  if (config.backend == BackendKind::kHttp) {
    if (config.endpoint.empty()) throw Error(ErrorCode::kConfig, "http backend needs an endpoint");
    if (config.api_key_env.empty()) throw Error(ErrorCode::kConfig, "http backend needs api_key_env");
  }
  if (config.backend == BackendKind::kReplay && config.cassette_path.empty()) {
    throw Error(ErrorCode::kConfig, "replay backend needs a cassette path");
  }
  if (config.timeout.count() <= 0) throw Error(ErrorCode::kConfig, "timeout_seconds must be positive");
  try {
    Validate(config.params);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
}

std::shared_ptr<CompletionBackend> MakeBackend(const AppConfig& config) {
  Validate(config);
  std::shared_ptr<CompletionBackend> backend;
  switch (config.backend) {
    case BackendKind::kStub:
      backend = std::make_shared<StubBackend>();
      break;
    case BackendKind::kReplay:
      backend = std::make_shared<ReplayBackend>(LoadCassette(config.cassette_path));
      break;
    case BackendKind::kHttp:
      backend = std::make_shared<HttpBackend>(HttpBackendConfig{config.endpoint, config.api_key_env, config.timeout, 1});
      break;
  }
  if (!config.record_cassette_path.empty()) backend = std::make_shared<RecordingBackend>(backend);
  return backend;
}

}  // namespace vizcap
