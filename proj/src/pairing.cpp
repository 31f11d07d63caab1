#include "dialeval/pairing.hpp"

#include <set>
#include <tuple>

#include "dialeval/error.hpp"
#include "dialeval/jsonl.hpp"
#include "dialeval/rng.hpp"

namespace dialeval {

namespace {

void require_seeds(std::span<const DialogueSeed> seeds) {
  if (seeds.empty()) throw ConfigError("seed corpus is empty");
}

void require_replicates(std::size_t replicates) {
  if (replicates < 1) throw ConfigError("replicates per pair must be at least 1");
}

void add_pair(PairingPlan& plan, const std::string& target, const std::string& partner,
              std::size_t replicates, std::span<const std::string> rotation) {
  for (std::size_t r = 0; r < replicates; ++r) {
    plan.tasks.push_back({target, partner, rotation[r % rotation.size()], r});
  }
}

}  // namespace

std::vector<std::string> seed_rotation(std::span<const DialogueSeed> seeds, std::uint64_t master_seed) {
  std::vector<std::string> ids;
  ids.reserve(seeds.size());
  for (const auto& s : seeds) ids.push_back(s.seed_id);
  auto gen = RngStream{master_seed}.derive("seed-shuffle").engine();
  portable_shuffle(std::span<std::string>(ids), gen);
  return ids;
}

PairingPlan plan_self_play(std::span<const SystemRef> targets, std::size_t replicates,
                           std::span<const DialogueSeed> seeds, std::uint64_t master_seed) {
  if (targets.empty()) throw ConfigError("self-play requires at least one target");
  require_replicates(replicates);
  require_seeds(seeds);
  validate_roster(targets);
  const auto rotation = seed_rotation(seeds, master_seed);
  PairingPlan plan{Method::SelfPlay, {}, {targets.begin(), targets.end()}, {}};
  plan.tasks.reserve(self_play_count(targets.size(), replicates));
  for (const auto& t : targets) add_pair(plan, t.id, t.id, replicates, rotation);
  return plan;
}

PairingPlan plan_all_play_all(std::span<const SystemRef> targets, std::size_t replicates,
                              std::span<const DialogueSeed> seeds, std::uint64_t master_seed) {
  if (targets.size() < 2) throw ConfigError("all-play-all requires at least two targets");
  require_replicates(replicates);
  require_seeds(seeds);
  validate_roster(targets);
  const auto rotation = seed_rotation(seeds, master_seed);
  PairingPlan plan{Method::AllPlayAll, {}, {targets.begin(), targets.end()}, {}};
  plan.tasks.reserve(all_play_all_count(targets.size(), replicates));
  for (const auto& a : targets) {
    for (const auto& b : targets) {
      if (a.id != b.id) add_pair(plan, a.id, b.id, replicates, rotation);
    }
  }
  return plan;
}

PairingPlan plan_bipartite(std::span<const SystemRef> targets, std::span<const SystemRef> partners,
                           std::size_t replicates, std::span<const DialogueSeed> seeds,
                           std::uint64_t master_seed) {
  if (targets.empty()) throw ConfigError("bipartite-play requires at least one target");
  if (partners.empty()) throw ConfigError("bipartite-play requires at least one partner");
  require_replicates(replicates);
  require_seeds(seeds);
  validate_roster(targets);
  validate_roster(partners);
  std::set<std::string_view> target_ids;
  for (const auto& t : targets) target_ids.insert(t.id);
  for (const auto& p : partners) {
    if (target_ids.count(p.id)) {
      throw ConfigError("partner '" + p.id + "' is also an evaluation target; the partner set must be disjoint");
    }
  }
  const auto rotation = seed_rotation(seeds, master_seed);
  PairingPlan plan{Method::Bipartite, {}, {targets.begin(), targets.end()}, {partners.begin(), partners.end()}};
  plan.tasks.reserve(bipartite_count(targets.size(), partners.size(), replicates));
  for (const auto& t : targets) {
    for (const auto& p : partners) add_pair(plan, t.id, p.id, replicates, rotation);
  }
  return plan;
}

void check_plan(const PairingPlan& plan, std::span<const DialogueSeed> seeds, std::size_t replicates) {
  std::size_t expected = 0;
  switch (plan.method) {
    case Method::SelfPlay: expected = self_play_count(plan.targets.size(), replicates); break;
    case Method::AllPlayAll: expected = all_play_all_count(plan.targets.size(), replicates); break;
    case Method::Bipartite: expected = bipartite_count(plan.targets.size(), plan.partners.size(), replicates); break;
  }
  if (plan.tasks.size() != expected) {
    throw Error("plan has " + std::to_string(plan.tasks.size()) + " tasks, expected " + std::to_string(expected));
  }
  std::set<std::string_view> seed_ids;
  for (const auto& s : seeds) seed_ids.insert(s.seed_id);
  std::set<std::tuple<std::string_view, std::string_view, std::size_t>> triples;
  for (const auto& t : plan.tasks) {
    if (!triples.emplace(t.target_id, t.partner_id, t.replicate_index).second) {
      throw Error("duplicate task " + t.target_id + "/" + t.partner_id + "/" + std::to_string(t.replicate_index));
    }
    if (!seed_ids.count(t.seed_id)) throw Error("task references unknown seed '" + t.seed_id + "'");
  }
}

void to_json(nlohmann::json& j, const DialogueTask& t) {
  j = {{"target_id", t.target_id},
       {"partner_id", t.partner_id},
       {"seed_id", t.seed_id},
       {"replicate_index", t.replicate_index}};
}

void from_json(const nlohmann::json& j, DialogueTask& t) {
  t.target_id = j.at("target_id").get<std::string>();
  t.partner_id = j.at("partner_id").get<std::string>();
  t.seed_id = j.at("seed_id").get<std::string>();
  t.replicate_index = j.at("replicate_index").get<std::size_t>();
}

void save_plan(const std::filesystem::path& path, const PairingPlan& plan) {
  std::string out;
  for (const auto& t : plan.tasks) {
    nlohmann::json j = t;
    j["method"] = to_string(plan.method);
    out += j.dump();
    out += '\n';
  }
  write_text_atomic(path, out);
}

PairingPlan load_plan(const std::filesystem::path& path) {
  PairingPlan plan;
  bool first = true;
  read_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
    const auto method = parse_method(j.at("method").get<std::string>());
    if (first) {
      plan.method = method;
      first = false;
    } else if (method != plan.method) {
      throw Error("mixed collection methods in one plan");
    }
    plan.tasks.push_back(j.get<DialogueTask>());
  });
  if (first) throw ParseError(path.string(), 0, "plan has no tasks");
  return plan;
}

}  // namespace dialeval
