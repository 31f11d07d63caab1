#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/fed.hpp"

namespace dialeval {

// Interpolated bigram/unigram cache model over the context tokens:
//
//   p(t_i | t_{i-1}) = w2 * c(t_{i-1} t_i) / c(t_{i-1} .) + w1 * c(t_i) / N + w0 / V
//
// so candidates that reuse context n-grams are more likely. When
// repetition_weight > 0, each candidate token listed in repetition_cues
// gains repetition_weight * R(context) nats, where R is the share of context
// bigrams already seen earlier in the context. Deterministic and cheap; it
// stands in for a neural dialogue model in tests and desk-scale runs.
struct MockOverlapSpec {
  double bigram_weight = 0.5;
  double unigram_weight = 0.4;
  double floor_weight = 0.1;
  double vocabulary_size = 5000.0;
  double repetition_weight = 0.0;
  std::vector<std::string> repetition_cues;
  std::optional<std::size_t> max_context_utterances;

  void validate() const;
};

class MockOverlapBackend final : public ScoringBackend {
 public:
  explicit MockOverlapBackend(MockOverlapSpec spec);

  Likelihood score(std::span<const std::string> context, std::string_view candidate) const override;
  std::string descriptor() const override;
  std::optional<std::size_t> max_context_utterances() const override { return spec_.max_context_utterances; }

  const MockOverlapSpec& spec() const { return spec_; }

 private:
  MockOverlapSpec spec_;
};

// Share of within-utterance bigram occurrences that repeat an earlier one.
double repetition_rate(std::span<const std::string> context);

void to_json(nlohmann::json& j, const MockOverlapSpec& s);
void from_json(const nlohmann::json& j, MockOverlapSpec& s);

}  // namespace dialeval
