#pragma once

// Independent reference implementations. Deliberately naive: no shared code
// with the library beyond the data types.

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dialeval/core.hpp"
#include "dialeval/fed.hpp"
#include "dialeval/stats.hpp"

namespace dialeval::oracle {

// Enumerates ordered (target, partner) pairs the long way and counts them.
inline std::size_t enumerate_pairs(Method method, std::size_t i, std::size_t k, std::size_t j) {
  std::size_t n = 0;
  for (std::size_t t = 0; t < i; ++t) {
    const std::size_t partners = method == Method::Bipartite ? k : i;
    for (std::size_t p = 0; p < partners; ++p) {
      if (method == Method::SelfPlay && p != t) continue;
      if (method == Method::AllPlayAll && p == t) continue;
      for (std::size_t r = 0; r < j; ++r) ++n;
    }
  }
  return n;
}

// Rank by counting: 1 + #strictly greater + (#equal - 1) / 2.
inline std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t a = 0; a < v.size(); ++a) {
    double greater = 0, equal = 0;
    for (std::size_t b = 0; b < v.size(); ++b) {
      if (v[b] > v[a]) greater += 1;
      if (v[b] == v[a]) equal += 1;
    }
    r[a] = 1.0 + greater + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx += (x[i] - mx) * (x[i] - mx);
    dy += (y[i] - my) * (y[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(brute_ranks(x), brute_ranks(y));
}

// Straight-line score of one utterance: concatenate, ask, sum, subtract.
template <typename Backend>
double utterance_score(const Backend& backend, const std::vector<std::string>& context, const std::string& response,
                       const std::vector<std::string>& positives, const std::vector<std::string>& negatives,
                       ScoreMode mode, bool mean_normalized) {
  std::vector<std::string> full = context;
  full.push_back(response);
  auto d = [&](const std::string& cand) {
    const auto l = backend.score(full, cand);
    return mean_normalized ? l.total_log_likelihood / static_cast<double>(l.token_count) : l.total_log_likelihood;
  };
  double pos = 0, neg = 0;
  for (const auto& p : positives) pos += d(p);
  for (const auto& n : negatives) neg += d(n);
  if (mode == ScoreMode::PositivesOnly) return pos;
  if (mode == ScoreMode::NegativesOnly) return -neg;
  return pos - neg;
}

// Flat recomputation of human system scores: for every system, the mean over
// its dialogues of the mean over that dialogue's workers.
inline std::map<std::string, double> flat_human_scores(const std::vector<AnnotationRecord>& records,
                                                       const std::string& dimension) {
  std::map<std::string, std::map<std::string, std::pair<double, int>>> per_dialogue;
  for (const auto& r : records) {
    auto it = r.likert.find(dimension);
    if (it == r.likert.end()) continue;
    auto& cell = per_dialogue[r.system_id][r.dialogue_id];
    cell.first += it->second;
    cell.second += 1;
  }
  std::map<std::string, double> out;
  for (const auto& [sys, dialogues] : per_dialogue) {
    double sum = 0;
    for (const auto& [_, cell] : dialogues) sum += cell.first / cell.second;
    out[sys] = sum / static_cast<double>(dialogues.size());
  }
  return out;
}

}  // namespace dialeval::oracle
