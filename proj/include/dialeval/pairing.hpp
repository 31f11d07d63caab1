#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/core.hpp"

namespace dialeval {

struct DialogueTask {
  std::string target_id;
  std::string partner_id;
  std::string seed_id;
  std::size_t replicate_index = 0;

  bool operator==(const DialogueTask&) const = default;
};

struct PairingPlan {
  Method method = Method::Bipartite;
  std::vector<DialogueTask> tasks;
  std::vector<SystemRef> targets;
  std::vector<SystemRef> partners;  // bipartite only
};

// Closed-form task counts for i targets, k partners and j replicates per pair.
constexpr std::size_t self_play_count(std::size_t i, std::size_t j) { return i * j; }
constexpr std::size_t all_play_all_count(std::size_t i, std::size_t j) { return i < 2 ? 0 : i * (i - 1) * j; }
constexpr std::size_t bipartite_count(std::size_t i, std::size_t k, std::size_t j) { return i * k * j; }

// Tasks are emitted pair by pair in roster order; replicate r of every pair
// opens with seed (r mod |seeds|) of a corpus shuffled once by master_seed.
PairingPlan plan_self_play(std::span<const SystemRef> targets, std::size_t replicates,
                           std::span<const DialogueSeed> seeds, std::uint64_t master_seed);
PairingPlan plan_all_play_all(std::span<const SystemRef> targets, std::size_t replicates,
                              std::span<const DialogueSeed> seeds, std::uint64_t master_seed);
PairingPlan plan_bipartite(std::span<const SystemRef> targets, std::span<const SystemRef> partners,
                           std::size_t replicates, std::span<const DialogueSeed> seeds,
                           std::uint64_t master_seed);

// Seed ids in the order replicates draw them.
std::vector<std::string> seed_rotation(std::span<const DialogueSeed> seeds, std::uint64_t master_seed);

// Verifies count, triple uniqueness and seed membership against the method.
void check_plan(const PairingPlan& plan, std::span<const DialogueSeed> seeds, std::size_t replicates);

void save_plan(const std::filesystem::path& path, const PairingPlan& plan);
// Roster fields are not part of the task log; callers reattach them.
PairingPlan load_plan(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const DialogueTask& t);
void from_json(const nlohmann::json& j, DialogueTask& t);

}  // namespace dialeval
