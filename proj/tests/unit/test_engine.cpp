#include <doctest.h>

#include <atomic>
#include <mutex>
#include <set>
#include <stdexcept>

#include "dialeval/engine.hpp"
#include "dialeval/error.hpp"
#include "synthetic.hpp"

using namespace dialeval;

TEST_CASE("parallel_for visits every index once") {
  for (std::size_t c : {1u, 3u, 16u}) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, c, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
                  std::runtime_error);
  CHECK_NOTHROW(parallel_for(0, 4, [](std::size_t) {}));
}

namespace {

struct Fixture {
  std::vector<SystemRef> targets = {testing::quality_system("a", 0.8, 0, 1), testing::quality_system("b", 0.2, 0, 2)};
  std::vector<SystemRef> partners = {testing::quality_system("p", 0.5, 0, 3), {"e", "", ScriptedBotSpec{}}};
  std::vector<DialogueSeed> seeds = testing::synthetic_seeds();
  BotRegistry bots;

  Fixture() {
    std::vector<SystemRef> all = targets;
    all.insert(all.end(), partners.begin(), partners.end());
    bots = make_registry(all);
  }
};

}  // namespace

TEST_CASE("dialogues follow the turn protocol") {
  Fixture f;
  const auto plan = plan_bipartite(f.targets, f.partners, 3, f.seeds, 9);
  const auto result = run_plan(plan, f.bots, f.seeds, 5, 9, 4);
  CHECK(result.summary.complete == plan.tasks.size());
  CHECK(result.summary.failed == 0);
  for (const auto& d : result.dialogues) {
    CHECK_NOTHROW(check_dialogue(d, 5));
    CHECK(d.utterances.size() == 12);
    CHECK(d.utterances[0].origin == Origin::Seed);
    CHECK(d.utterances[2].origin == Origin::Generated);
    CHECK(d.utterances[2].system_id == d.target_id);
    CHECK(d.utterances[3].system_id == d.partner_id);
    const auto& seed = *std::find_if(f.seeds.begin(), f.seeds.end(), [&](const auto& s) { return s.seed_id == d.seed_id; });
    CHECK(d.utterances[0].text == seed.first_text);
    CHECK(d.utterances[1].text == seed.second_text);
    if (d.partner_id == "e") {
      for (std::size_t i = 3; i < d.utterances.size(); i += 2) CHECK(d.utterances[i].text == d.utterances[i - 1].text);
    }
  }
}

TEST_CASE("collection is independent of concurrency and order") {
  Fixture f;
  const auto plan = plan_bipartite(f.targets, f.partners, 4, f.seeds, 2);
  auto reversed = plan;
  std::reverse(reversed.tasks.begin(), reversed.tasks.end());
  const auto serial = run_plan(plan, f.bots, f.seeds, 3, 2, 1);
  CHECK(run_plan(plan, f.bots, f.seeds, 3, 2, 8).dialogues == serial.dialogues);
  CHECK(run_plan(reversed, f.bots, f.seeds, 3, 2, 8).dialogues == serial.dialogues);
  CHECK(run_plan(plan, f.bots, f.seeds, 3, 3, 1).dialogues != serial.dialogues);
}

TEST_CASE("bot failures produce failed dialogues, not crashes") {
  class Flaky final : public Bot {
   public:
    std::string respond(const BotRequest& r, RngStream) const override {
      if (r.history.size() >= 5) throw RetryableError("connection refused");
      return "fine";
    }
    HealthStatus health() const override { return {true, "flaky"}; }
  };
  Fixture f;
  f.bots["p"] = BotHandle{"p", std::make_shared<Flaky>()};
  const auto plan = plan_bipartite(f.targets, f.partners, 2, f.seeds, 1);
  std::mutex m;
  std::size_t seen = 0;
  const auto result = run_plan(plan, f.bots, f.seeds, 5, 1, 4, [&](const Dialogue&) {
    std::lock_guard lock(m);
    ++seen;
  });
  CHECK(seen == plan.tasks.size());
  CHECK(result.summary.failed == 4);
  CHECK(result.summary.complete == 4);
  for (const auto& d : result.dialogues) {
    if (d.partner_id != "p") continue;
    CHECK_FALSE(d.complete());
    CHECK(d.status.reason.find("p at turn 5") != std::string::npos);
    CHECK(d.utterances.size() == 5);
    CHECK_NOTHROW(check_dialogue(d));
  }
}

TEST_CASE("run_plan validates handles and seeds up front") {
  Fixture f;
  auto plan = plan_bipartite(f.targets, f.partners, 1, f.seeds, 1);
  auto missing = f.bots;
  missing.erase("a");
  CHECK_THROWS(run_plan(plan, missing, f.seeds, 2, 1, 1));
  plan.tasks[0].seed_id = "unknown";
  CHECK_THROWS(run_plan(plan, f.bots, f.seeds, 2, 1, 1));
}
