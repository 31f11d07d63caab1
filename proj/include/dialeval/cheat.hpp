#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/evaluation.hpp"

namespace dialeval {

// An unfair target set: the unfavored system plus two systems similar to it,
// and the favored system whose standing should improve.
struct CheatScenario {
  std::string favored_id;
  std::string unfavored_id;
  std::array<std::string, 2> similar_ids;
  Dimension dimension = Dimension::specificity();

  void validate() const;
  std::array<std::string, 4> systems() const { return {favored_id, unfavored_id, similar_ids[0], similar_ids[1]}; }
};

// Rows: fair outcome, columns: unfair outcome. "Wins" means the favored
// system scored strictly higher than the unfavored one.
struct FlipTable {
  std::size_t fair_win_unfair_win = 0;
  std::size_t fair_win_unfair_lose = 0;
  std::size_t fair_lose_unfair_win = 0;
  std::size_t fair_lose_unfair_lose = 0;

  std::size_t total() const {
    return fair_win_unfair_win + fair_win_unfair_lose + fair_lose_unfair_win + fair_lose_unfair_lose;
  }
  bool operator==(const FlipTable&) const = default;
};

struct ScenarioOutcome {
  CheatScenario scenario;
  bool fair_favored_wins = false;
  bool unfair_favored_wins = false;
  RankingReport unfair_ranking;
};

// All-play-all over exactly the four scenario systems with the shared settings.
RankingReport run_unfair_evaluation(const CheatScenario& scenario, const EvaluationSettings& settings);

FlipTable flip_table(std::span<const CheatScenario> scenarios, const RankingReport& fair_ranking,
                     const EvaluationSettings& settings, std::vector<ScenarioOutcome>* outcomes = nullptr);

std::vector<CheatScenario> load_scenarios(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const CheatScenario& s);
void from_json(const nlohmann::json& j, CheatScenario& s);
void to_json(nlohmann::json& j, const FlipTable& t);
void from_json(const nlohmann::json& j, FlipTable& t);
void to_json(nlohmann::json& j, const ScenarioOutcome& o);

}  // namespace dialeval
