#include "dialeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "dialeval/error.hpp"
#include "dialeval/jsonl.hpp"

namespace dialeval {

const RankEntry& RankingReport::entry(std::string_view system_id) const {
  for (const auto& e : entries) {
    if (e.system_id == system_id) return e;
  }
  throw Error("system '" + std::string(system_id) + "' missing from " + dimension.name + " ranking");
}

std::vector<double> average_ranks_descending(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean(i+1 .. j+1).
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

RankingReport rank_systems(const std::map<std::string, double>& system_scores, const Dimension& dimension,
                           std::string method) {
  if (system_scores.size() < 2) throw Error("ranking needs at least two systems");
  std::vector<double> scores;
  for (const auto& [id, s] : system_scores) {
    if (!std::isfinite(s)) throw Error("non-finite score for system '" + id + "'");
    scores.push_back(s);
  }
  const auto ranks = average_ranks_descending(scores);
  RankingReport report{dimension, std::move(method), {}};
  std::size_t i = 0;
  for (const auto& [id, s] : system_scores) report.entries.push_back({id, s, ranks[i++], 0});
  std::sort(report.entries.begin(), report.entries.end(), [](const RankEntry& a, const RankEntry& b) {
    return a.score != b.score ? a.score > b.score : a.system_id < b.system_id;
  });
  return report;
}

RankingReport rank_from_records(std::span<const ScoreRecord> records, const Dimension& dimension,
                                std::string method, std::span<const std::string> targets) {
  std::map<std::string, std::vector<ScoreRecord>> by_target;
  for (const auto& r : records) {
    if (r.dimension == dimension) by_target[r.target_id].push_back(r);
  }
  std::map<std::string, double> scores;
  for (const auto& [id, recs] : by_target) scores[id] = mean_dialogue_score(recs);
  auto report = rank_systems(scores, dimension, std::move(method));
  for (auto& e : report.entries) e.m_effective = by_target[e.system_id].size();
  for (const auto& t : targets) {
    if (!by_target.count(t)) report.unranked.push_back(t);
  }
  return report;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: length mismatch");
  if (x.size() < 2) throw Error("spearman: need at least two observations");
  const auto rx = average_ranks_descending(x);
  const auto ry = average_ranks_descending(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("spearman: zero rank variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  std::vector<AnnotationRecord> out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;  // dialogue, worker, dimension
  read_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    auto rec = j.get<AnnotationRecord>();
    for (const auto& [dim, _] : rec.likert) {
      if (!seen.emplace(rec.dialogue_id, rec.worker_id, dim).second) {
        throw ParseError(path.string(), line,
                         "duplicate " + dim + " rating of " + rec.dialogue_id + " by " + rec.worker_id);
      }
    }
    out.push_back(std::move(rec));
  });
  return out;
}

namespace {

// dialogue -> (system, worker -> score) for one dimension.
struct DialogueRatings {
  std::string system_id;
  std::map<std::string, int> by_worker;
};

std::map<std::string, DialogueRatings> collect_ratings(std::span<const AnnotationRecord> annotations,
                                                       const Dimension& dimension) {
  std::map<std::string, DialogueRatings> out;
  for (const auto& a : annotations) {
    const auto it = a.likert.find(dimension.name);
    if (it == a.likert.end()) continue;
    auto& d = out[a.dialogue_id];
    if (d.system_id.empty()) {
      d.system_id = a.system_id;
    } else if (d.system_id != a.system_id) {
      throw Error("dialogue '" + a.dialogue_id + "' attributed to two systems");
    }
    if (!d.by_worker.emplace(a.worker_id, it->second).second) {
      throw Error("duplicate rating of '" + a.dialogue_id + "' by '" + a.worker_id + "'");
    }
  }
  return out;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::map<std::string, double> per_system_means(const std::map<std::string, std::vector<double>>& dialogue_means) {
  std::map<std::string, double> out;
  for (const auto& [system, means] : dialogue_means) out[system] = mean(means);
  return out;
}

void require_systems(const std::map<std::string, double>& scores, std::span<const std::string> expected) {
  for (const auto& s : expected) {
    if (!scores.count(s)) throw Error("no annotations for system '" + s + "'");
  }
}

}  // namespace

std::map<std::string, double> human_scores(std::span<const AnnotationRecord> annotations, const Dimension& dimension,
                                           std::span<const std::string> expected_systems) {
  std::map<std::string, std::vector<double>> dialogue_means;
  for (const auto& [dialogue, ratings] : collect_ratings(annotations, dimension)) {
    double sum = 0.0;
    for (const auto& [worker, score] : ratings.by_worker) sum += score;
    dialogue_means[ratings.system_id].push_back(sum / static_cast<double>(ratings.by_worker.size()));
  }
  auto scores = per_system_means(dialogue_means);
  require_systems(scores, expected_systems);
  return scores;
}

RankingReport human_ranking(std::span<const AnnotationRecord> annotations, const Dimension& dimension,
                            std::span<const std::string> expected_systems) {
  return rank_systems(human_scores(annotations, dimension, expected_systems), dimension, "human");
}

double split_half_agreement(std::span<const AnnotationRecord> annotations, const Dimension& dimension,
                            RngStream stream, std::optional<std::size_t> first_group_size) {
  std::map<std::string, std::vector<double>> group_a;
  std::map<std::string, std::vector<double>> group_b;
  for (const auto& [dialogue, ratings] : collect_ratings(annotations, dimension)) {
    const std::size_t n = ratings.by_worker.size();
    if (n < 2) throw Error("split-half agreement needs at least two workers per dialogue ('" + dialogue + "')");
    const std::size_t k = first_group_size.value_or(n / 2);
    if (k < 1 || k >= n) throw Error("split-half group size must leave both groups non-empty");
    std::vector<int> scores;
    for (const auto& [worker, score] : ratings.by_worker) scores.push_back(score);
    auto gen = stream.derive(dialogue).engine();
    portable_shuffle(std::span<int>(scores), gen);
    const auto avg = [](auto first, auto last) {
      return std::accumulate(first, last, 0.0) / static_cast<double>(std::distance(first, last));
    };
    group_a[ratings.system_id].push_back(avg(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k)));
    group_b[ratings.system_id].push_back(avg(scores.begin() + static_cast<std::ptrdiff_t>(k), scores.end()));
  }
  std::vector<double> a, b;
  for (const auto& [system, s] : per_system_means(group_a)) a.push_back(s);
  for (const auto& [system, s] : per_system_means(group_b)) b.push_back(s);
  return spearman(a, b);
}

ConvergenceResult convergence_point(std::span<const PairStream> streams, std::size_t interval, std::size_t window) {
  if (streams.empty()) throw Error("convergence: no score streams");
  if (interval < 1 || window < 1) throw Error("convergence: interval and window must be positive");
  std::size_t shortest = streams.front().scores.size();
  std::set<std::string> systems;
  for (const auto& s : streams) {
    shortest = std::min(shortest, s.scores.size());
    systems.insert(s.target_id);
  }
  if (systems.size() < 2) throw Error("convergence: need at least two systems");
  const std::size_t checkpoints = shortest / interval;
  if (checkpoints < window) {
    throw Error("convergence: streams too short for " + std::to_string(window) + " checkpoints of " +
                std::to_string(interval));
  }

  ConvergenceResult result;
  std::vector<double> previous_ranks;
  std::size_t run_start = 0;
  std::size_t run_length = 0;
  for (std::size_t c = 1; c <= checkpoints; ++c) {
    const std::size_t n = c * interval;
    std::map<std::string, std::pair<double, std::size_t>> sums;
    for (const auto& s : streams) {
      auto& acc = sums[s.target_id];
      for (std::size_t i = 0; i < n; ++i) acc.first += s.scores[i];
      acc.second += n;
    }
    std::map<std::string, double> means;
    for (const auto& [id, acc] : sums) means[id] = acc.first / static_cast<double>(acc.second);
    const auto report = rank_systems(means, Dimension{"convergence"});
    std::vector<double> ranks;
    for (const auto& [id, _] : means) ranks.push_back(report.entry(id).rank);

    if (ranks == previous_ranks) {
      ++run_length;
    } else {
      run_start = n;
      run_length = 1;
      previous_ranks = ranks;
    }
    result.checkpoints_evaluated = c;
    result.ranking.clear();
    for (const auto& e : report.entries) result.ranking.push_back(e.system_id);
    if (run_length >= window) {
      result.converged = true;
      result.dialogues_per_pair = run_start;
      return result;
    }
  }
  result.dialogues_per_pair = checkpoints * interval;
  return result;
}

void to_json(nlohmann::json& j, const RankEntry& e) {
  j = {{"system_id", e.system_id}, {"score", e.score}, {"rank", e.rank}, {"m_effective", e.m_effective}};
}

void from_json(const nlohmann::json& j, RankEntry& e) {
  e.system_id = j.at("system_id").get<std::string>();
  e.score = j.at("score").get<double>();
  e.rank = j.at("rank").get<double>();
  e.m_effective = j.value("m_effective", std::size_t{0});
}

void to_json(nlohmann::json& j, const RankingReport& r) {
  j = {{"dimension", r.dimension.name}, {"method", r.method}, {"entries", r.entries}};
  if (!r.unranked.empty()) j["unranked"] = r.unranked;
}

void from_json(const nlohmann::json& j, RankingReport& r) {
  r.dimension = {j.at("dimension").get<std::string>()};
  r.method = j.value("method", std::string{});
  r.entries = j.at("entries").get<std::vector<RankEntry>>();
  r.unranked = j.value("unranked", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const AnnotationRecord& a) {
  j = {{"dialogue_id", a.dialogue_id}, {"system_id", a.system_id}, {"worker_id", a.worker_id}, {"scores", a.likert}};
}

void from_json(const nlohmann::json& j, AnnotationRecord& a) {
  a.dialogue_id = j.at("dialogue_id").get<std::string>();
  a.system_id = j.at("system_id").get<std::string>();
  a.worker_id = j.at("worker_id").get<std::string>();
  a.likert.clear();
  for (const auto& [dim, v] : j.at("scores").items()) {
    if (!v.is_number_integer()) throw Error("Likert score for " + dim + " must be an integer");
    const int score = v.get<int>();
    if (score < 1 || score > 5) throw Error("Likert score for " + dim + " out of range 1..5");
    a.likert[dim] = score;
  }
}

void to_json(nlohmann::json& j, const ConvergenceResult& c) {
  j = {{"converged", c.converged},
       {"dialogues_per_pair", c.dialogues_per_pair},
       {"ranking", c.ranking},
       {"checkpoints_evaluated", c.checkpoints_evaluated}};
}

}  // namespace dialeval
