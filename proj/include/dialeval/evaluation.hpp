#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dialeval/bot.hpp"
#include "dialeval/engine.hpp"
#include "dialeval/fed.hpp"
#include "dialeval/pairing.hpp"
#include "dialeval/stats.hpp"

namespace dialeval {

// Everything a collection-plus-rating pass needs besides the roster split.
struct EvaluationSettings {
  std::vector<SystemRef> roster;  // every system that may appear in a plan
  BotRegistry bots;
  std::vector<DialogueSeed> seeds;
  std::size_t replicates = 1;
  std::size_t exchanges = 5;
  std::uint64_t master_seed = 0;
  std::shared_ptr<const Scorer> scorer;
  std::vector<ResponseSet> response_sets;
  ScoreMode mode = ScoreMode::NegativesOnly;
  std::size_t concurrency = 1;

  const SystemRef& system(std::string_view id) const;
};

struct EvaluationResult {
  PairingPlan plan;
  CollectionResult collection;
  std::vector<ScoreRecord> scores;
  std::vector<RankingReport> rankings;  // one per dimension, in request order
};

PairingPlan make_plan(Method method, std::span<const SystemRef> targets, std::span<const SystemRef> partners,
                      std::size_t replicates, std::span<const DialogueSeed> seeds, std::uint64_t master_seed);

EvaluationResult evaluate(const PairingPlan& plan, const EvaluationSettings& settings,
                          std::span<const Dimension> dimensions);

}  // namespace dialeval
