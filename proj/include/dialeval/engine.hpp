#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dialeval/bot.hpp"
#include "dialeval/core.hpp"
#include "dialeval/pairing.hpp"

namespace dialeval {

// Runs fn(i) for i in [0, n) on up to `concurrency` threads. The first
// exception is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t concurrency, const std::function<void(std::size_t)>& fn);

// Seeds at 0 and 1 (Target then Partner), then 2*exchanges generated turns
// starting with the Target. Bot errors produce a Failed dialogue.
Dialogue run_dialogue(const DialogueTask& task, Method method, const BotHandle& target_bot,
                      const BotHandle& partner_bot, std::size_t exchanges, const DialogueSeed& seed,
                      RngStream stream);

struct CollectionSummary {
  std::size_t complete = 0;
  std::size_t failed = 0;
};

struct CollectionResult {
  std::vector<Dialogue> dialogues;  // sorted by (target, partner, replicate)
  CollectionSummary summary;
};

// on_finished, if set, sees each dialogue as soon as it is done (from worker
// threads, serialized by the engine).
CollectionResult run_plan(const PairingPlan& plan, const BotRegistry& bots, std::span<const DialogueSeed> seeds,
                          std::size_t exchanges, std::uint64_t master_seed, std::size_t concurrency_limit,
                          const std::function<void(const Dialogue&)>& on_finished = {});

}  // namespace dialeval
