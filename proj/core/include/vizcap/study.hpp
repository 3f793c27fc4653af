#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace vizcap {

enum class CaptionTier { kT1 = 0, kT2 = 1, kT3 = 2 };
enum class RankItem { kT1 = 0, kT2 = 1, kT3 = 2, kNone = 3 };
enum class Quality { kRelevance = 0, kRepetitiveness = 1, kNovelty = 2 };

inline constexpr std::size_t kTierCount = 3;
inline constexpr std::size_t kQualityCount = 3;

using Ranking = std::array<RankItem, 4>;  // most to least

struct Ballot {
  std::string participant;
  std::string visualization;
  Quality quality = Quality::kRelevance;
  Ranking ranking{};
};

struct EngagementVote {
  std::string participant;
  std::string visualization;
  CaptionTier choice = CaptionTier::kT1;
};

using TierCounts = std::array<std::size_t, kTierCount>;

struct QualityTally {
  TierCounts top{};                                // effective rank 1 per tier
  std::array<TierCounts, kTierCount> by_rank{};    // [position][tier], positions 1..3
  std::size_t none_first = 0;                      // ballots with None on top
  std::size_t ballots = 0;
};

using QualityTallies = std::array<QualityTally, kQualityCount>;

struct EvalSummary {
  QualityTallies qualities{};
  TierCounts engagement{};
  std::size_t n_participants = 0;
  std::size_t n_visualizations = 0;
};

// Error(kValidation) unless the ranking holds T1, T2, T3 and None exactly once.
void ValidateRanking(const Ranking& ranking);

// Items strictly above None, order preserved.
std::vector<CaptionTier> TruncateAtNone(const Ranking& ranking);

// Duplicate (participant, visualization, quality) keys are a validation error.
QualityTallies TallyQuality(const std::vector<Ballot>& ballots);
// Duplicate (participant, visualization) keys are a validation error.
TierCounts TallyEngagement(const std::vector<EngagementVote>& votes);

EvalSummary Summarize(const std::vector<Ballot>& ballots, const std::vector<EngagementVote>& votes);

// Ballot CSV: participant,visualization,quality,rank1,rank2,rank3,rank4 with
// items T1|T2|T3|None. Engagement CSV: participant,visualization,choice.
std::vector<Ballot> ParseBallotCsv(std::string_view text);
std::vector<EngagementVote> ParseEngagementCsv(std::string_view text);

std::string_view ToString(Quality quality);
Quality ParseQuality(std::string_view text);
std::string_view ToString(RankItem item);
RankItem ParseRankItem(std::string_view text);
std::string_view ToString(CaptionTier tier);
CaptionTier ParseCaptionTier(std::string_view text);

nlohmann::json ToJson(const EvalSummary& summary);
EvalSummary EvalSummaryFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const Ballot& ballot);
Ballot BallotFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const EngagementVote& vote);
EngagementVote EngagementVoteFromJson(const nlohmann::json& j);

}  // namespace vizcap
