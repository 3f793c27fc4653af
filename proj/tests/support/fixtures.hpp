#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vizcap/prompt.hpp"

#ifndef VIZCAP_FIXTURE_DIR
#error "VIZCAP_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace vizcap::testing {

inline std::string FixturePath(const std::string& name) { return std::string(VIZCAP_FIXTURE_DIR) + "/" + name; }

inline std::string ReadFixture(const std::string& name) {
  std::ifstream in(FixturePath(name), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A transcribed refinement transcript: base prompt, turns, captions in order.
struct Script {
  std::string base;
  std::vector<std::pair<TurnKind, std::string>> turns;
  std::vector<std::string> captions;
  PromptStyle style;
};

inline Script LoadScript(const std::string& name) {
  const auto j = nlohmann::json::parse(ReadFixture(name + "_script.json"));
  Script s;
  s.base = j.at("base").get<std::string>();
  for (const auto& t : j.at("turns")) {
    s.turns.emplace_back(ParseTurnKind(t.at("kind").get<std::string>()), t.at("text").get<std::string>());
  }
  s.captions = j.at("captions").get<std::vector<std::string>>();
  s.style = j.at("style").get<std::string>() == "compact" ? PromptStyle::Compact() : PromptStyle::Standard();
  return s;
}

}  // namespace vizcap::testing
