#include "dialeval/cheat.hpp"

#include <set>

#include "dialeval/error.hpp"
#include "dialeval/jsonl.hpp"

namespace dialeval {

void CheatScenario::validate() const {
  const auto ids = systems();
  const std::set<std::string> unique(ids.begin(), ids.end());
  if (unique.size() != ids.size()) throw ConfigError("cheat scenario needs four distinct system ids");
  for (const auto& id : ids) {
    if (id.empty()) throw ConfigError("cheat scenario has an empty system id");
  }
}

RankingReport run_unfair_evaluation(const CheatScenario& scenario, const EvaluationSettings& settings) {
  scenario.validate();
  if (settings.replicates < 1) throw ConfigError("unfair evaluation needs at least one replicate (empty plan)");
  std::vector<SystemRef> targets;
  for (const auto& id : scenario.systems()) targets.push_back(settings.system(id));
  const auto plan =
      plan_all_play_all(targets, settings.replicates, settings.seeds, settings.master_seed);
  const std::array<Dimension, 1> dims{scenario.dimension};
  auto result = evaluate(plan, settings, dims);
  return std::move(result.rankings.front());
}

FlipTable flip_table(std::span<const CheatScenario> scenarios, const RankingReport& fair_ranking,
                     const EvaluationSettings& settings, std::vector<ScenarioOutcome>* outcomes) {
  for (const auto& s : scenarios) {
    s.validate();
    fair_ranking.entry(s.favored_id);
    fair_ranking.entry(s.unfavored_id);
  }
  // Scenarios run side by side; each one collects serially.
  EvaluationSettings inner = settings;
  inner.concurrency = 1;
  std::vector<ScenarioOutcome> results(scenarios.size());
  parallel_for(scenarios.size(), settings.concurrency, [&](std::size_t i) {
    const auto& s = scenarios[i];
    auto& out = results[i];
    out.scenario = s;
    out.fair_favored_wins = fair_ranking.entry(s.favored_id).score > fair_ranking.entry(s.unfavored_id).score;
    out.unfair_ranking = run_unfair_evaluation(s, inner);
    out.unfair_favored_wins =
        out.unfair_ranking.entry(s.favored_id).score > out.unfair_ranking.entry(s.unfavored_id).score;
  });

  FlipTable table;
  for (const auto& r : results) {
    if (r.fair_favored_wins) {
      (r.unfair_favored_wins ? table.fair_win_unfair_win : table.fair_win_unfair_lose)++;
    } else {
      (r.unfair_favored_wins ? table.fair_lose_unfair_win : table.fair_lose_unfair_lose)++;
    }
  }
  if (outcomes) *outcomes = std::move(results);
  return table;
}

std::vector<CheatScenario> load_scenarios(const std::filesystem::path& path) {
  auto scenarios = read_jsonl_as<CheatScenario>(path);
  if (scenarios.empty()) throw ParseError(path.string(), 0, "no scenarios");
  return scenarios;
}

void to_json(nlohmann::json& j, const CheatScenario& s) {
  j = {{"favored_id", s.favored_id},
       {"unfavored_id", s.unfavored_id},
       {"similar_ids", s.similar_ids},
       {"dimension", s.dimension.name}};
}

void from_json(const nlohmann::json& j, CheatScenario& s) {
  s.favored_id = j.at("favored_id").get<std::string>();
  s.unfavored_id = j.at("unfavored_id").get<std::string>();
  const auto similar = j.at("similar_ids").get<std::vector<std::string>>();
  if (similar.size() != 2) throw ConfigError("similar_ids must list exactly two systems");
  s.similar_ids = {similar[0], similar[1]};
  s.dimension = {j.value("dimension", std::string("Specificity"))};
  s.validate();
}

void to_json(nlohmann::json& j, const FlipTable& t) {
  j = {{"fair_wins_unfair_wins", t.fair_win_unfair_win},
       {"fair_wins_unfair_loses", t.fair_win_unfair_lose},
       {"fair_loses_unfair_wins", t.fair_lose_unfair_win},
       {"fair_loses_unfair_loses", t.fair_lose_unfair_lose},
       {"total", t.total()}};
}

void from_json(const nlohmann::json& j, FlipTable& t) {
  t.fair_win_unfair_win = j.at("fair_wins_unfair_wins").get<std::size_t>();
  t.fair_win_unfair_lose = j.at("fair_wins_unfair_loses").get<std::size_t>();
  t.fair_lose_unfair_win = j.at("fair_loses_unfair_wins").get<std::size_t>();
  t.fair_lose_unfair_lose = j.at("fair_loses_unfair_loses").get<std::size_t>();
}

void to_json(nlohmann::json& j, const ScenarioOutcome& o) {
  j = {{"scenario", o.scenario},
       {"fair_favored_wins", o.fair_favored_wins},
       {"unfair_favored_wins", o.unfair_favored_wins},
       {"unfair_ranking", o.unfair_ranking}};
}

}  // namespace dialeval
