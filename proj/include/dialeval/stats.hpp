#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/fed.hpp"
#include "dialeval/rng.hpp"

namespace dialeval {

struct RankEntry {
  std::string system_id;
  double score = 0.0;
  double rank = 0.0;  // 1 = best; ties share their average position
  std::size_t m_effective = 0;

  bool operator==(const RankEntry&) const = default;
};

struct RankingReport {
  Dimension dimension;
  std::string method;
  std::vector<RankEntry> entries;  // score descending, then system_id ascending
  std::vector<std::string> unranked;  // targets without a single complete dialogue

  const RankEntry& entry(std::string_view system_id) const;
  bool operator==(const RankingReport&) const = default;
};

// Average ranks, highest value first (rank 1). Ties are exact equality.
std::vector<double> average_ranks_descending(std::span<const double> values);

RankingReport rank_systems(const std::map<std::string, double>& system_scores, const Dimension& dimension,
                           std::string method = {});

// Groups records of one dimension by target, averages dialogue scores and
// ranks. Targets in `targets` with no records land in `unranked`.
RankingReport rank_from_records(std::span<const ScoreRecord> records, const Dimension& dimension,
                                std::string method, std::span<const std::string> targets = {});

// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct AnnotationRecord {
  std::string dialogue_id;
  std::string system_id;
  std::string worker_id;
  std::map<std::string, int> likert;  // dimension name -> 1..5
};

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

// Per system: mean over dialogues of the mean over workers. Systems listed
// in `expected_systems` must have at least one annotated dialogue.
std::map<std::string, double> human_scores(std::span<const AnnotationRecord> annotations, const Dimension& dimension,
                                           std::span<const std::string> expected_systems = {});
RankingReport human_ranking(std::span<const AnnotationRecord> annotations, const Dimension& dimension,
                            std::span<const std::string> expected_systems = {});

// Workers of each dialogue are shuffled by the stream and split into a group
// of `first_group_size` (default: half, rounded down) and the rest; returns
// Spearman between the two groups' per-system score vectors.
double split_half_agreement(std::span<const AnnotationRecord> annotations, const Dimension& dimension,
                            RngStream stream, std::optional<std::size_t> first_group_size = std::nullopt);

// Per (target, partner) pair, dialogue scores in replicate order.
struct PairStream {
  std::string target_id;
  std::string partner_id;
  std::vector<double> scores;
};

struct ConvergenceResult {
  bool converged = false;
  std::size_t dialogues_per_pair = 0;  // first checkpoint of the stable window
  std::vector<std::string> ranking;    // at that checkpoint, or at the last one if not converged
  std::size_t checkpoints_evaluated = 0;
};

// Smallest checkpoint n*interval at which the full ranking (average ranks,
// from the first n*interval dialogues of every pair) stays identical over
// `window` consecutive checkpoints.
ConvergenceResult convergence_point(std::span<const PairStream> streams, std::size_t interval = 50,
                                    std::size_t window = 3);

void to_json(nlohmann::json& j, const RankEntry& e);
void from_json(const nlohmann::json& j, RankEntry& e);
void to_json(nlohmann::json& j, const RankingReport& r);
void from_json(const nlohmann::json& j, RankingReport& r);
void to_json(nlohmann::json& j, const AnnotationRecord& a);
void from_json(const nlohmann::json& j, AnnotationRecord& a);
void to_json(nlohmann::json& j, const ConvergenceResult& c);

}  // namespace dialeval
