#include "dialeval/fed.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "dialeval/engine.hpp"
#include "dialeval/error.hpp"
#include "dialeval/jsonl.hpp"

namespace dialeval {

std::vector<Dimension> default_dimensions() {
  return {Dimension::specificity(), Dimension::sensibleness(), Dimension::overall()};
}

std::string_view to_string(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::Full: return "full";
    case ScoreMode::NegativesOnly: return "negatives-only";
    case ScoreMode::PositivesOnly: return "positives-only";
  }
  return "?";
}

std::string_view to_string(Normalization n) {
  return n == Normalization::SumLogProb ? "sum-log-prob" : "mean-log-prob";
}

ScoreMode parse_score_mode(std::string_view s) {
  if (s == "full") return ScoreMode::Full;
  if (s == "negatives-only") return ScoreMode::NegativesOnly;
  if (s == "positives-only") return ScoreMode::PositivesOnly;
  throw ConfigError("unknown score mode '" + std::string(s) + "'");
}

Normalization parse_normalization(std::string_view s) {
  if (s == "sum-log-prob") return Normalization::SumLogProb;
  if (s == "mean-log-prob") return Normalization::MeanLogProb;
  throw ConfigError("unknown normalization '" + std::string(s) + "'");
}

std::vector<ResponseSet> load_response_sets(const std::filesystem::path& path) {
  std::vector<ResponseSet> sets;
  std::set<std::string> seen;
  read_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    auto rs = j.get<ResponseSet>();
    if (!seen.insert(rs.dimension.name).second) {
      throw ParseError(path.string(), line, "duplicate dimension '" + rs.dimension.name + "'");
    }
    sets.push_back(std::move(rs));
  });
  if (sets.empty()) throw ParseError(path.string(), 0, "no response sets");
  return sets;
}

const ResponseSet& find_response_set(std::span<const ResponseSet> sets, const Dimension& dimension) {
  for (const auto& rs : sets) {
    if (rs.dimension == dimension) return rs;
  }
  throw ConfigError("no response set for dimension '" + dimension.name + "'");
}

Scorer::Scorer(std::shared_ptr<const ScoringBackend> backend, Normalization normalization)
    : backend_(std::move(backend)),
      normalization_(normalization),
      truncations_(std::make_shared<std::atomic<std::size_t>>(0)) {
  if (!backend_) throw ConfigError("scorer needs a backend");
}

std::string Scorer::descriptor() const {
  return backend_->descriptor() + ";" + std::string(to_string(normalization_));
}

double Scorer::likelihood(std::span<const Utterance> context, std::string_view response,
                          std::string_view candidate) const {
  std::size_t keep = context.size();
  if (const auto max = backend_->max_context_utterances()) {
    const std::size_t room = *max > 0 ? *max - 1 : 0;
    if (keep > room) {
      keep = room;
      truncations_->fetch_add(1, std::memory_order_relaxed);
    }
  }
  std::vector<std::string> joined;
  joined.reserve(keep + 1);
  for (const auto& u : context.last(keep)) joined.push_back(u.text);
  joined.emplace_back(response);

  const auto l = backend_->score(joined, candidate);
  if (normalization_ == Normalization::SumLogProb) return l.total_log_likelihood;
  if (l.token_count < 1) throw ProtocolError("backend reported token_count < 1");
  return l.total_log_likelihood / static_cast<double>(l.token_count);
}

double score_utterance(std::span<const Utterance> context, std::string_view response, const ResponseSet& rs,
                       ScoreMode mode, const Scorer& scorer) {
  const bool use_pos = mode != ScoreMode::NegativesOnly;
  const bool use_neg = mode != ScoreMode::PositivesOnly;
  const bool undefined = (mode == ScoreMode::PositivesOnly && rs.positives.empty()) ||
                         (mode == ScoreMode::NegativesOnly && rs.negatives.empty()) ||
                         (rs.positives.empty() && rs.negatives.empty());
  if (undefined) {
    throw UndefinedScoreError(std::string(to_string(mode)) + " score is undefined for this dimension (" +
                              rs.dimension.name + " has no candidates for it)");
  }
  double pos = 0.0;
  double neg = 0.0;
  if (use_pos) {
    for (const auto& p : rs.positives) pos += scorer.likelihood(context, response, p);
  }
  if (use_neg) {
    for (const auto& n : rs.negatives) neg += scorer.likelihood(context, response, n);
  }
  return pos - neg;
}

std::vector<std::size_t> scored_indices(const Dialogue& dialogue) {
  std::vector<std::size_t> out;
  for (const auto& u : dialogue.utterances) {
    if (u.speaker == Role::Target && u.origin == Origin::Generated) out.push_back(u.index);
  }
  return out;
}

ScoreRecord score_dialogue(const Dialogue& dialogue, const ResponseSet& rs, ScoreMode mode, const Scorer& scorer) {
  if (!dialogue.complete()) throw Error("cannot score failed dialogue " + dialogue.dialogue_id);
  ScoreRecord rec{dialogue.dialogue_id, dialogue.target_id, dialogue.partner_id, dialogue.replicate_index,
                  rs.dimension, mode, scorer.descriptor(), {}, 0.0};
  const auto indices = scored_indices(dialogue);
  if (indices.empty()) throw Error("dialogue " + dialogue.dialogue_id + " has no generated target utterances");
  double sum = 0.0;
  for (const auto i : indices) {
    const double s = score_utterance(context_of(dialogue, i), dialogue.utterances[i].text, rs, mode, scorer);
    rec.utterance_scores.emplace_back(i, s);
    sum += s;
  }
  rec.dialogue_score = sum / static_cast<double>(indices.size());
  return rec;
}

double mean_dialogue_score(std::span<const ScoreRecord> records) {
  if (records.empty()) throw Error("no complete dialogues for system");
  double sum = 0.0;
  for (const auto& r : records) sum += r.dialogue_score;
  return sum / static_cast<double>(records.size());
}

double score_system(std::span<const Dialogue> dialogues, const ResponseSet& rs, ScoreMode mode,
                    const Scorer& scorer) {
  std::vector<ScoreRecord> records;
  const std::string* target = nullptr;
  for (const auto& d : dialogues) {
    if (target && d.target_id != *target) throw Error("score_system given dialogues of several targets");
    target = &d.target_id;
    if (d.complete()) records.push_back(score_dialogue(d, rs, mode, scorer));
  }
  if (records.empty()) {
    throw Error("no complete dialogues for system" + (target ? " '" + *target + "'" : std::string{}));
  }
  return mean_dialogue_score(records);
}

std::vector<ScoreRecord> score_dialogues(std::span<const Dialogue> dialogues, std::span<const Dimension> dimensions,
                                         std::span<const ResponseSet> sets, ScoreMode mode, const Scorer& scorer,
                                         std::size_t concurrency) {
  std::vector<const ResponseSet*> rs;
  for (const auto& d : dimensions) rs.push_back(&find_response_set(sets, d));
  std::vector<const Dialogue*> complete;
  for (const auto& d : dialogues) {
    if (d.complete()) complete.push_back(&d);
  }
  std::vector<ScoreRecord> out(complete.size() * rs.size());
  parallel_for(out.size(), concurrency, [&](std::size_t i) {
    out[i] = score_dialogue(*complete[i / rs.size()], *rs[i % rs.size()], mode, scorer);
  });
  return out;
}

void to_json(nlohmann::json& j, const ResponseSet& rs) {
  j = {{"dimension", rs.dimension.name}, {"positives", rs.positives}, {"negatives", rs.negatives}};
}

void from_json(const nlohmann::json& j, ResponseSet& rs) {
  rs.dimension = {j.at("dimension").get<std::string>()};
  rs.positives = j.value("positives", std::vector<std::string>{});
  rs.negatives = j.value("negatives", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const ScoreRecord& r) {
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& [i, s] : r.utterance_scores) scores.push_back({i, s});
  j = {{"dialogue_id", r.dialogue_id},
       {"target_id", r.target_id},
       {"partner_id", r.partner_id},
       {"replicate_index", r.replicate_index},
       {"dimension", r.dimension.name},
       {"mode", to_string(r.mode)},
       {"backend", r.backend},
       {"utterance_scores", scores},
       {"dialogue_score", r.dialogue_score}};
}

void from_json(const nlohmann::json& j, ScoreRecord& r) {
  r.dialogue_id = j.at("dialogue_id").get<std::string>();
  r.target_id = j.at("target_id").get<std::string>();
  r.partner_id = j.at("partner_id").get<std::string>();
  r.replicate_index = j.at("replicate_index").get<std::size_t>();
  r.dimension = {j.at("dimension").get<std::string>()};
  r.mode = parse_score_mode(j.at("mode").get<std::string>());
  r.backend = j.at("backend").get<std::string>();
  r.utterance_scores.clear();
  for (const auto& pair : j.at("utterance_scores")) {
    r.utterance_scores.emplace_back(pair.at(0).get<std::size_t>(), pair.at(1).get<double>());
  }
  r.dialogue_score = j.at("dialogue_score").get<double>();
}

}  // namespace dialeval
