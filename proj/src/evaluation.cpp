#include "dialeval/evaluation.hpp"

#include "dialeval/error.hpp"

namespace dialeval {

const SystemRef& EvaluationSettings::system(std::string_view id) const {
  for (const auto& s : roster) {
    if (s.id == id) return s;
  }
  throw ConfigError("unknown system '" + std::string(id) + "'");
}

PairingPlan make_plan(Method method, std::span<const SystemRef> targets, std::span<const SystemRef> partners,
                      std::size_t replicates, std::span<const DialogueSeed> seeds, std::uint64_t master_seed) {
  switch (method) {
    case Method::SelfPlay: return plan_self_play(targets, replicates, seeds, master_seed);
    case Method::AllPlayAll: return plan_all_play_all(targets, replicates, seeds, master_seed);
    case Method::Bipartite: return plan_bipartite(targets, partners, replicates, seeds, master_seed);
  }
  throw ConfigError("unknown method");
}

EvaluationResult evaluate(const PairingPlan& plan, const EvaluationSettings& settings,
                          std::span<const Dimension> dimensions) {
  if (!settings.scorer) throw ConfigError("evaluation needs a scorer");
  EvaluationResult result;
  result.plan = plan;
  result.collection =
      run_plan(plan, settings.bots, settings.seeds, settings.exchanges, settings.master_seed, settings.concurrency);
  result.scores = score_dialogues(result.collection.dialogues, dimensions, settings.response_sets, settings.mode,
                                  *settings.scorer, settings.concurrency);
  std::vector<std::string> targets;
  for (const auto& t : plan.targets) targets.push_back(t.id);
  for (const auto& dim : dimensions) {
    result.rankings.push_back(rank_from_records(result.scores, dim, std::string(to_string(plan.method)), targets));
  }
  return result;
}

}  // namespace dialeval
