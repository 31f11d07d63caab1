#include "dialeval/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "dialeval/error.hpp"

namespace dialeval {

void parallel_for(std::size_t n, std::size_t concurrency, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(concurrency, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!stop.load(std::memory_order_relaxed)) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            stop = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

Dialogue run_dialogue(const DialogueTask& task, Method method, const BotHandle& target_bot,
                      const BotHandle& partner_bot, std::size_t exchanges, const DialogueSeed& seed,
                      RngStream stream) {
  if (exchanges < 1) throw ConfigError("exchange count must be at least 1");
  if (seed.seed_id != task.seed_id) throw Error("seed mismatch for task");
  Dialogue d;
  d.dialogue_id = make_dialogue_id(method, task.target_id, task.partner_id, task.replicate_index);
  d.target_id = task.target_id;
  d.partner_id = task.partner_id;
  d.seed_id = task.seed_id;
  d.method = method;
  d.replicate_index = task.replicate_index;
  d.utterances.reserve(dialogue_length(exchanges));
  d.utterances.push_back({0, Role::Target, task.target_id, seed.first_text, Origin::Seed});
  d.utterances.push_back({1, Role::Partner, task.partner_id, seed.second_text, Origin::Seed});

  for (std::size_t turn = 2; turn < dialogue_length(exchanges); ++turn) {
    const Role role = role_at(turn);
    const BotHandle& speaker = role == Role::Target ? target_bot : partner_bot;
    // History is exactly the prefix before this turn.
    const BotRequest request{d.dialogue_id, role, std::span<const Utterance>(d.utterances)};
    try {
      auto text = respond(speaker, request, stream.derive(static_cast<std::uint64_t>(turn)));
      d.utterances.push_back({turn, role, speaker.system_id, std::move(text), Origin::Generated});
    } catch (const Error& e) {
      d.status = DialogueStatus::failed(speaker.system_id + " at turn " + std::to_string(turn) + ": " + e.what());
      return d;
    }
  }
  return d;
}

CollectionResult run_plan(const PairingPlan& plan, const BotRegistry& bots, std::span<const DialogueSeed> seeds,
                          std::size_t exchanges, std::uint64_t master_seed, std::size_t concurrency_limit,
                          const std::function<void(const Dialogue&)>& on_finished) {
  if (exchanges < 1) throw ConfigError("exchange count must be at least 1");
  std::map<std::string_view, const DialogueSeed*> seed_index;
  for (const auto& s : seeds) seed_index.emplace(s.seed_id, &s);
  for (const auto& t : plan.tasks) {
    for (const auto& id : {t.target_id, t.partner_id}) {
      if (!bots.count(id)) throw ConfigError("no bot handle for system '" + id + "'");
    }
    if (!seed_index.count(t.seed_id)) throw ConfigError("plan references unknown seed '" + t.seed_id + "'");
  }

  CollectionResult result;
  result.dialogues.resize(plan.tasks.size());
  std::mutex hook_mutex;
  parallel_for(plan.tasks.size(), concurrency_limit, [&](std::size_t i) {
    const auto& t = plan.tasks[i];
    result.dialogues[i] = run_dialogue(t, plan.method, bots.find(t.target_id)->second,
                                       bots.find(t.partner_id)->second, exchanges, *seed_index.at(t.seed_id),
                                       task_stream(master_seed, t.target_id, t.partner_id, t.replicate_index));
    if (on_finished) {
      std::lock_guard lock(hook_mutex);
      on_finished(result.dialogues[i]);
    }
  });
  std::sort(result.dialogues.begin(), result.dialogues.end(), [](const Dialogue& a, const Dialogue& b) {
    return std::tie(a.target_id, a.partner_id, a.replicate_index) <
           std::tie(b.target_id, b.partner_id, b.replicate_index);
  });
  for (const auto& d : result.dialogues) (d.complete() ? result.summary.complete : result.summary.failed)++;
  return result;
}

}  // namespace dialeval
