#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/bot.hpp"
#include "dialeval/core.hpp"

namespace dialeval {

struct Dimension {
  std::string name;

  static Dimension fluency() { return {"Fluency"}; }
  static Dimension specificity() { return {"Specificity"}; }
  static Dimension sensibleness() { return {"Sensibleness"}; }
  static Dimension overall() { return {"Overall"}; }

  auto operator<=>(const Dimension&) const = default;
};

// Dimensions scored when none are configured; Fluency is left out.
std::vector<Dimension> default_dimensions();

struct ResponseSet {
  Dimension dimension;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

std::vector<ResponseSet> load_response_sets(const std::filesystem::path& path);
const ResponseSet& find_response_set(std::span<const ResponseSet> sets, const Dimension& dimension);

enum class ScoreMode { Full, NegativesOnly, PositivesOnly };
enum class Normalization { SumLogProb, MeanLogProb };

std::string_view to_string(ScoreMode mode);
std::string_view to_string(Normalization n);
ScoreMode parse_score_mode(std::string_view s);
Normalization parse_normalization(std::string_view s);

struct Likelihood {
  double total_log_likelihood = 0.0;
  std::int64_t token_count = 0;
};

// Conditional log-likelihood of a candidate follow-up given the utterance
// history. Implementations must tolerate concurrent calls.
class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;
  virtual Likelihood score(std::span<const std::string> context, std::string_view candidate) const = 0;
  virtual std::string descriptor() const = 0;
  virtual std::optional<std::size_t> max_context_utterances() const { return std::nullopt; }
};

std::shared_ptr<const ScoringBackend> make_remote_backend(const std::string& endpoint, const RemoteOptions& options,
                                                          std::optional<std::size_t> max_context = std::nullopt);

// Backend plus the normalization that turns a Likelihood into D.
class Scorer {
 public:
  Scorer(std::shared_ptr<const ScoringBackend> backend, Normalization normalization);

  // D(context + response, candidate).
  double likelihood(std::span<const Utterance> context, std::string_view response, std::string_view candidate) const;

  const ScoringBackend& backend() const { return *backend_; }
  Normalization normalization() const { return normalization_; }
  std::string descriptor() const;
  std::size_t truncation_events() const { return truncations_->load(); }

 private:
  std::shared_ptr<const ScoringBackend> backend_;
  Normalization normalization_;
  std::shared_ptr<std::atomic<std::size_t>> truncations_;
};

struct ScoreRecord {
  std::string dialogue_id;
  std::string target_id;
  std::string partner_id;
  std::size_t replicate_index = 0;
  Dimension dimension;
  ScoreMode mode = ScoreMode::NegativesOnly;
  std::string backend;
  std::vector<std::pair<std::size_t, double>> utterance_scores;
  double dialogue_score = 0.0;

  bool operator==(const ScoreRecord&) const = default;
};

// sum_p D(c+r, p) - sum_n D(c+r, n), restricted to the sides the mode keeps.
double score_utterance(std::span<const Utterance> context, std::string_view response, const ResponseSet& rs,
                       ScoreMode mode, const Scorer& scorer);

// Indices scored for a dialogue: Target-role, generated utterances only.
std::vector<std::size_t> scored_indices(const Dialogue& dialogue);

ScoreRecord score_dialogue(const Dialogue& dialogue, const ResponseSet& rs, ScoreMode mode, const Scorer& scorer);

// Mean of already computed dialogue scores.
double mean_dialogue_score(std::span<const ScoreRecord> records);

// Mean dialogue score over one target's complete dialogues.
double score_system(std::span<const Dialogue> dialogues, const ResponseSet& rs, ScoreMode mode,
                    const Scorer& scorer);

// Scores every complete dialogue on every dimension, in parallel. Output
// order is dialogue order, then dimension order.
std::vector<ScoreRecord> score_dialogues(std::span<const Dialogue> dialogues, std::span<const Dimension> dimensions,
                                         std::span<const ResponseSet> sets, ScoreMode mode, const Scorer& scorer,
                                         std::size_t concurrency);

void to_json(nlohmann::json& j, const ResponseSet& rs);
void from_json(const nlohmann::json& j, ResponseSet& rs);
void to_json(nlohmann::json& j, const ScoreRecord& r);
void from_json(const nlohmann::json& j, ScoreRecord& r);

}  // namespace dialeval
