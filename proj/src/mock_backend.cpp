#include "dialeval/mock_backend.hpp"

#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "dialeval/error.hpp"

namespace dialeval {

namespace {

using Bigram = std::pair<std::string, std::string>;

}  // namespace

void MockOverlapSpec::validate() const {
  if (bigram_weight < 0 || unigram_weight < 0 || floor_weight <= 0) {
    throw ConfigError("mock backend weights must be non-negative with a positive floor");
  }
  if (std::abs(bigram_weight + unigram_weight + floor_weight - 1.0) > 1e-9) {
    throw ConfigError("mock backend interpolation weights must sum to 1");
  }
  if (vocabulary_size < 1) throw ConfigError("mock backend vocabulary_size must be >= 1");
  if (repetition_weight < 0) throw ConfigError("repetition_weight must be non-negative");
  if (max_context_utterances && *max_context_utterances < 1) throw ConfigError("max_context_utterances must be >= 1");
}

MockOverlapBackend::MockOverlapBackend(MockOverlapSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

double repetition_rate(std::span<const std::string> context) {
  std::set<Bigram> seen;
  std::size_t total = 0;
  std::size_t repeats = 0;
  for (const auto& text : context) {
    const auto tokens = tokenize(text);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      ++total;
      if (!seen.emplace(tokens[i - 1], tokens[i]).second) ++repeats;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(repeats) / static_cast<double>(total);
}

Likelihood MockOverlapBackend::score(std::span<const std::string> context, std::string_view candidate) const {
  std::unordered_map<std::string, double> unigram;
  std::unordered_map<std::string, double> history;
  std::map<Bigram, double> bigram;
  double n = 0.0;
  for (const auto& text : context) {
    const auto tokens = tokenize(text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      unigram[tokens[i]] += 1.0;
      n += 1.0;
      if (i + 1 < tokens.size()) {
        history[tokens[i]] += 1.0;
        bigram[{tokens[i], tokens[i + 1]}] += 1.0;
      }
    }
  }

  const auto count = [](const auto& m, const auto& key) {
    const auto it = m.find(key);
    return it == m.end() ? 0.0 : it->second;
  };

  const auto tokens = tokenize(candidate);
  if (tokens.empty()) throw Error("mock backend: candidate has no tokens");
  double total = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    double p = spec_.floor_weight / spec_.vocabulary_size;
    if (n > 0) p += spec_.unigram_weight * count(unigram, tokens[i]) / n;
    if (i > 0) {
      const double h = count(history, tokens[i - 1]);
      if (h > 0) p += spec_.bigram_weight * count(bigram, Bigram{tokens[i - 1], tokens[i]}) / h;
    }
    total += std::log(p);
  }

  if (spec_.repetition_weight > 0 && !spec_.repetition_cues.empty()) {
    const std::set<std::string, std::less<>> cues(spec_.repetition_cues.begin(), spec_.repetition_cues.end());
    std::size_t hits = 0;
    for (const auto& t : tokens) hits += cues.count(t);
    if (hits > 0) total += spec_.repetition_weight * repetition_rate(context) * static_cast<double>(hits);
  }
  return {total, static_cast<std::int64_t>(tokens.size())};
}

std::string MockOverlapBackend::descriptor() const { return "mock-overlap:" + nlohmann::json(spec_).dump(); }

void to_json(nlohmann::json& j, const MockOverlapSpec& s) {
  j = {{"bigram_weight", s.bigram_weight},
       {"unigram_weight", s.unigram_weight},
       {"floor_weight", s.floor_weight},
       {"vocabulary_size", s.vocabulary_size},
       {"repetition_weight", s.repetition_weight},
       {"repetition_cues", s.repetition_cues}};
  if (s.max_context_utterances) j["max_context_utterances"] = *s.max_context_utterances;
}

void from_json(const nlohmann::json& j, MockOverlapSpec& s) {
  s = MockOverlapSpec{};
  s.bigram_weight = j.value("bigram_weight", s.bigram_weight);
  s.unigram_weight = j.value("unigram_weight", s.unigram_weight);
  s.floor_weight = j.value("floor_weight", s.floor_weight);
  s.vocabulary_size = j.value("vocabulary_size", s.vocabulary_size);
  s.repetition_weight = j.value("repetition_weight", s.repetition_weight);
  s.repetition_cues = j.value("repetition_cues", s.repetition_cues);
  if (j.contains("max_context_utterances") && !j["max_context_utterances"].is_null()) {
    s.max_context_utterances = j["max_context_utterances"].get<std::size_t>();
  }
}

}  // namespace dialeval
