#include "vizcap/study.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "vizcap/csv.hpp"
#include "vizcap/error.hpp"

namespace vizcap {

using nlohmann::json;

namespace {

std::string Normalize(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == ' ' || c == '\t') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string Trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a header row when its first cell names the first column.
std::vector<csv::Record> DataRecords(std::string_view text, std::string_view first_header) {
  auto records = csv::ParseRecords(text);
  if (!records.empty() && !records.front().empty() && Normalize(records.front().front()) == first_header) {
    records.erase(records.begin());
  }
  return records;
}

constexpr std::array<std::string_view, kTierCount> kTierNames = {"T1", "T2", "T3"};

}  // namespace

std::string_view ToString(Quality quality) {
  switch (quality) {
    case Quality::kRelevance: return "relevance";
    case Quality::kRepetitiveness: return "repetitiveness";
    case Quality::kNovelty: return "novelty";
  }
  return "relevance";
}

Quality ParseQuality(std::string_view text) {
  const auto n = Normalize(text);
  if (n == "relevance") return Quality::kRelevance;
  if (n == "repetitiveness") return Quality::kRepetitiveness;
  if (n == "novelty") return Quality::kNovelty;
  throw Error(ErrorCode::kValidation, "unknown quality '" + std::string(text) + "'");
}

std::string_view ToString(RankItem item) {
  return item == RankItem::kNone ? "None" : kTierNames[static_cast<std::size_t>(item)];
}

RankItem ParseRankItem(std::string_view text) {
  const auto n = Normalize(text);
  if (n == "t1" || n == "caption1") return RankItem::kT1;
  if (n == "t2" || n == "caption2") return RankItem::kT2;
  if (n == "t3" || n == "caption3") return RankItem::kT3;
  if (n == "none") return RankItem::kNone;
  throw Error(ErrorCode::kValidation, "unknown ranking item '" + std::string(text) + "'");
}

std::string_view ToString(CaptionTier tier) { return kTierNames[static_cast<std::size_t>(tier)]; }

CaptionTier ParseCaptionTier(std::string_view text) {
  const auto item = ParseRankItem(text);
  if (item == RankItem::kNone) throw Error(ErrorCode::kValidation, "engagement choice cannot be None");
  return static_cast<CaptionTier>(item);
}

void ValidateRanking(const Ranking& ranking) {
  std::array<int, 4> seen{};
  for (const auto item : ranking) ++seen[static_cast<std::size_t>(item)];
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
    throw Error(ErrorCode::kValidation, "ranking must list T1, T2, T3 and None exactly once");
  }
}

std::vector<CaptionTier> TruncateAtNone(const Ranking& ranking) {
  std::vector<CaptionTier> out;
  for (const auto item : ranking) {
    if (item == RankItem::kNone) break;
    out.push_back(static_cast<CaptionTier>(item));
  }
  return out;
}

QualityTallies TallyQuality(const std::vector<Ballot>& ballots) {
  QualityTallies tallies{};
  std::set<std::tuple<std::string, std::string, int>> keys;
  for (const auto& b : ballots) {
    ValidateRanking(b.ranking);
    if (!keys.emplace(b.participant, b.visualization, static_cast<int>(b.quality)).second) {
      throw Error(ErrorCode::kValidation, "duplicate ballot for participant '" + b.participant +
                                              "', visualization '" + b.visualization + "', quality " +
                                              std::string(ToString(b.quality)));
    }
    auto& tally = tallies[static_cast<std::size_t>(b.quality)];
    ++tally.ballots;
    const auto effective = TruncateAtNone(b.ranking);
    if (effective.empty()) {
      ++tally.none_first;
      continue;
    }
    ++tally.top[static_cast<std::size_t>(effective.front())];
    for (std::size_t pos = 0; pos < effective.size(); ++pos) {
      ++tally.by_rank[pos][static_cast<std::size_t>(effective[pos])];
    }
  }
  return tallies;
}

TierCounts TallyEngagement(const std::vector<EngagementVote>& votes) {
  TierCounts counts{};
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& v : votes) {
    if (!keys.emplace(v.participant, v.visualization).second) {
      throw Error(ErrorCode::kValidation, "duplicate engagement vote for participant '" + v.participant +
                                              "', visualization '" + v.visualization + "'");
    }
    ++counts[static_cast<std::size_t>(v.choice)];
  }
  return counts;
}

EvalSummary Summarize(const std::vector<Ballot>& ballots, const std::vector<EngagementVote>& votes) {
  EvalSummary summary;
  summary.qualities = TallyQuality(ballots);
  summary.engagement = TallyEngagement(votes);
  std::set<std::string> participants;
  std::set<std::string> visualizations;
  for (const auto& b : ballots) {
    participants.insert(b.participant);
    visualizations.insert(b.visualization);
  }
  for (const auto& v : votes) {
    participants.insert(v.participant);
    visualizations.insert(v.visualization);
  }
  summary.n_participants = participants.size();
  summary.n_visualizations = visualizations.size();
  return summary;
}

std::vector<Ballot> ParseBallotCsv(std::string_view text) {
  std::vector<Ballot> ballots;
  const auto records = DataRecords(text, "participant");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.size() != 7) {
      throw ParseError("ballot row " + std::to_string(i + 1) + " has " + std::to_string(r.size()) +
                           " cells, expected 7",
                       i + 1);
    }
    Ballot b;
    b.participant = Trimmed(r[0]);
    b.visualization = Trimmed(r[1]);
    b.quality = ParseQuality(r[2]);
    for (std::size_t k = 0; k < 4; ++k) b.ranking[k] = ParseRankItem(r[3 + k]);
    ValidateRanking(b.ranking);
    ballots.push_back(std::move(b));
  }
  return ballots;
}

std::vector<EngagementVote> ParseEngagementCsv(std::string_view text) {
  std::vector<EngagementVote> votes;
  const auto records = DataRecords(text, "participant");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.size() != 3) {
      throw ParseError("engagement row " + std::to_string(i + 1) + " has " + std::to_string(r.size()) +
                           " cells, expected 3",
                       i + 1);
    }
    votes.push_back({Trimmed(r[0]), Trimmed(r[1]), ParseCaptionTier(r[2])});
  }
  return votes;
}

namespace {

json CountsJson(const TierCounts& counts) {
  json j;
  for (std::size_t t = 0; t < kTierCount; ++t) j[std::string(kTierNames[t])] = counts[t];
  return j;
}

TierCounts CountsFromJson(const json& j) {
  TierCounts counts{};
  for (std::size_t t = 0; t < kTierCount; ++t) counts[t] = j.value(std::string(kTierNames[t]), std::size_t{0});
  return counts;
}

}  // namespace

json ToJson(const EvalSummary& summary) {
  json j;
  j["n_participants"] = summary.n_participants;
  j["n_visualizations"] = summary.n_visualizations;
  j["engagement"] = CountsJson(summary.engagement);
  json qualities;
  for (std::size_t q = 0; q < kQualityCount; ++q) {
    const auto& t = summary.qualities[q];
    json by_rank = json::array();
    for (const auto& counts : t.by_rank) by_rank.push_back(CountsJson(counts));
    qualities[std::string(ToString(static_cast<Quality>(q)))] = {
        {"top", CountsJson(t.top)}, {"by_rank", by_rank}, {"none_first", t.none_first}, {"ballots", t.ballots}};
  }
  j["qualities"] = std::move(qualities);
  return j;
}

EvalSummary EvalSummaryFromJson(const json& j) {
  EvalSummary s;
  s.n_participants = j.value("n_participants", std::size_t{0});
  s.n_visualizations = j.value("n_visualizations", std::size_t{0});
  if (j.contains("engagement")) s.engagement = CountsFromJson(j["engagement"]);
  if (j.contains("qualities")) {
    for (std::size_t q = 0; q < kQualityCount; ++q) {
      const auto name = std::string(ToString(static_cast<Quality>(q)));
      if (!j["qualities"].contains(name)) continue;
      const auto& e = j["qualities"][name];
      auto& t = s.qualities[q];
      if (e.contains("top")) t.top = CountsFromJson(e["top"]);
      if (e.contains("by_rank")) {
        for (std::size_t p = 0; p < kTierCount && p < e["by_rank"].size(); ++p) t.by_rank[p] = CountsFromJson(e["by_rank"][p]);
      }
      t.none_first = e.value("none_first", std::size_t{0});
      t.ballots = e.value("ballots", std::size_t{0});
    }
  }
  return s;
}

json ToJson(const Ballot& b) {
  json ranking = json::array();
  for (const auto item : b.ranking) ranking.push_back(ToString(item));
  return {{"participant", b.participant}, {"visualization", b.visualization}, {"quality", ToString(b.quality)},
          {"ranking", ranking}};
}

Ballot BallotFromJson(const json& j) {
  Ballot b;
  b.participant = j.at("participant").get<std::string>();
  b.visualization = j.at("visualization").get<std::string>();
  b.quality = ParseQuality(j.at("quality").get<std::string>());
  const auto& ranking = j.at("ranking");
  if (!ranking.is_array() || ranking.size() != 4) throw Error(ErrorCode::kValidation, "ranking must have 4 items");
  for (std::size_t k = 0; k < 4; ++k) b.ranking[k] = ParseRankItem(ranking[k].get<std::string>());
  ValidateRanking(b.ranking);
  return b;
}

json ToJson(const EngagementVote& v) {
  return {{"participant", v.participant}, {"visualization", v.visualization}, {"choice", ToString(v.choice)}};
}

EngagementVote EngagementVoteFromJson(const json& j) {
  return {j.at("participant").get<std::string>(), j.at("visualization").get<std::string>(),
          ParseCaptionTier(j.at("choice").get<std::string>())};
}

}  // namespace vizcap
