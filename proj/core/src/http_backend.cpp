#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "vizcap/llm.hpp"

namespace vizcap {

using nlohmann::json;

namespace {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path;
};

SplitUrl SplitEndpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfig, "endpoint '" + url + "' must start with http:// or https://");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kConfig, "unsupported endpoint scheme '" + scheme + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (out.scheme_host_port.size() <= scheme_end + 3) {
    throw Error(ErrorCode::kConfig, "endpoint '" + url + "' has no host");
  }
  return out;
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const auto split = SplitEndpoint(config_.endpoint);
  scheme_host_port_ = split.scheme_host_port;
  path_ = split.path;
}

json HttpBackend::RequestBody(const CompletionRequest& request) {
  return {{"model", request.params.model},
          {"prompt", request.prompt},
          {"max_tokens", request.params.max_completion_tokens},
          {"temperature", request.params.temperature},
          {"frequency_penalty", request.params.frequency_penalty},
          {"presence_penalty", request.params.presence_penalty}};
}

CompletionResponse HttpBackend::Generate(const CompletionRequest& request) {
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorCode::kAuth, "environment variable " + config_.api_key_env + " with the API key is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = RequestBody(request).dump();

  httplib::Client client(scheme_host_port_);
  const auto timeout = static_cast<time_t>(config_.timeout.count());
  client.set_connection_timeout(timeout, 0);
  client.set_read_timeout(timeout, 0);
  client.set_write_timeout(timeout, 0);

  std::string last_failure;
  for (int attempt = 0; attempt <= config_.retries_on_network_error; ++attempt) {
    auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
      last_failure = "request to " + config_.endpoint + " failed: " + httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    if (status == 401 || status == 403) {
      throw Error(ErrorCode::kAuth, "completions endpoint rejected the credentials (HTTP " + std::to_string(status) + ")");
    }
    if (status >= 400 && status < 500) {
      throw Error(ErrorCode::kBackend, "completions endpoint returned HTTP " + std::to_string(status) + ": " +
                                           result->body.substr(0, 200));
    }
    if (status >= 500) {
      last_failure = "completions endpoint returned HTTP " + std::to_string(status);
      continue;
    }
    try {
      const auto reply = json::parse(result->body);
      CompletionResponse response;
      response.backend = BackendKind::kHttp;
      response.text = reply.at("choices").at(0).at("text").get<std::string>();
      if (reply.contains("usage")) {
        response.prompt_tokens = reply["usage"].value("prompt_tokens", std::size_t{0});
        response.completion_tokens = reply["usage"].value("completion_tokens", std::size_t{0});
      }
      return response;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kBackend, std::string("unexpected completions response: ") + e.what());
    }
  }
  throw Error(ErrorCode::kNetwork, last_failure);
}

}  // namespace vizcap
