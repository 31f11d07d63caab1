#include <doctest.h>

#include <fstream>

#include "dialeval/error.hpp"
#include "dialeval/stats.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace dialeval;

TEST_CASE("average ranks match brute force") {
  auto gen = RngStream{4}.engine();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(9);
    for (auto& x : v) x = static_cast<double>(uniform_index(gen, 5));
    CHECK(average_ranks_descending(v) == oracle::brute_ranks(v));
  }
}

TEST_CASE("spearman against brute force, with and without ties") {
  auto gen = RngStream{8}.engine();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(11), y(11);
    for (std::size_t i = 0; i < 11; ++i) {
      x[i] = trial % 2 ? static_cast<double>(uniform_index(gen, 4)) : uniform01(gen);
      y[i] = uniform01(gen);
    }
    x[0] = 10.0;  // never constant
    CHECK(std::abs(spearman(x, y) - oracle::spearman(x, y)) < 1e-12);
  }
  const std::vector<double> a = {1, 2, 3, 4}, b = {10, 20, 30, 40}, c = {4, 3, 2, 1};
  CHECK(spearman(a, b) == doctest::Approx(1.0));
  CHECK(spearman(a, c) == doctest::Approx(-1.0));
  const std::vector<double> flat = {1, 1, 1, 1};
  CHECK_THROWS(spearman(a, flat));
  const std::vector<double> short_v = {1, 2};
  CHECK_THROWS(spearman(a, short_v));
}

TEST_CASE("ranking order and ties") {
  const std::map<std::string, double> scores = {{"b", 2.0}, {"a", 2.0}, {"c", 5.0}, {"d", -1.0}};
  const auto r = rank_systems(scores, Dimension::overall(), "bipartite");
  REQUIRE(r.entries.size() == 4);
  CHECK(r.entries[0].system_id == "c");
  CHECK(r.entries[1].system_id == "a");
  CHECK(r.entries[2].system_id == "b");
  CHECK(r.entry("a").rank == 2.5);
  CHECK(r.entry("b").rank == 2.5);
  CHECK(r.entry("d").rank == 4.0);
  CHECK_THROWS(rank_systems({{"a", 1.0}}, Dimension::overall()));
}

TEST_CASE("ranking from records") {
  std::vector<ScoreRecord> recs;
  auto add = [&](std::string t, double s) {
    recs.push_back({"d", t, "p", recs.size(), Dimension::specificity(), ScoreMode::NegativesOnly, "stub", {}, s});
  };
  add("x", 1.0);
  add("x", 3.0);
  add("y", 1.5);
  recs.push_back({"d", "z", "p", 0, Dimension::overall(), ScoreMode::NegativesOnly, "stub", {}, 9.0});
  const std::vector<std::string> targets = {"x", "y", "z"};
  const auto r = rank_from_records(recs, Dimension::specificity(), "bipartite", targets);
  CHECK(r.entry("x").score == 2.0);
  CHECK(r.entry("x").m_effective == 2);
  CHECK(r.unranked == std::vector<std::string>{"z"});
  const auto j = nlohmann::json(r);
  CHECK(j.get<RankingReport>() == r);
}

namespace {

std::vector<AnnotationRecord> synthetic_annotations(std::size_t systems, std::size_t dialogues, std::size_t workers,
                                                    double noise, std::uint64_t seed) {
  auto gen = RngStream{seed}.engine();
  std::vector<AnnotationRecord> out;
  for (std::size_t s = 0; s < systems; ++s) {
    const double mean = 1.5 + 3.0 * static_cast<double>(s) / static_cast<double>(systems - 1);
    for (std::size_t d = 0; d < dialogues; ++d) {
      for (std::size_t w = 0; w < workers; ++w) {
        const double v = std::round(mean + noise * standard_normal(gen));
        out.push_back({"sys" + std::to_string(s) + "/" + std::to_string(d), "sys" + std::to_string(s),
                       "w" + std::to_string(w), {{"Overall", static_cast<int>(std::clamp(v, 1.0, 5.0))}}});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("human scores match flat recomputation") {
  const auto ann = synthetic_annotations(5, 8, 3, 1.0, 1);
  const auto got = human_scores(ann, Dimension::overall());
  const auto want = oracle::flat_human_scores(ann, "Overall");
  REQUIRE(got.size() == want.size());
  for (const auto& [k, v] : want) CHECK(got.at(k) == doctest::Approx(v).epsilon(1e-12));
  const std::vector<std::string> expected = {"sys0", "missing"};
  CHECK_THROWS(human_scores(ann, Dimension::overall(), expected));
}

TEST_CASE("split-half agreement") {
  const auto clean = synthetic_annotations(8, 20, 6, 0.2, 2);
  const auto noisy = synthetic_annotations(8, 20, 6, 3.0, 2);
  const auto a = split_half_agreement(clean, Dimension::overall(), RngStream{1});
  CHECK(a == split_half_agreement(clean, Dimension::overall(), RngStream{1}));
  CHECK(a > split_half_agreement(noisy, Dimension::overall(), RngStream{1}));
  CHECK(a > 0.9);
  const auto one_worker = synthetic_annotations(3, 4, 1, 0.1, 3);
  CHECK_THROWS(split_half_agreement(one_worker, Dimension::overall(), RngStream{1}));
}

TEST_CASE("annotation files") {
  testing::TempDir dir;
  std::ofstream(dir / "ok.jsonl") << R"({"dialogue_id":"d1","system_id":"s","worker_id":"w","scores":{"Overall":4}})"
                                  << "\n";
  CHECK(load_annotations(dir / "ok.jsonl")[0].likert.at("Overall") == 4);
  std::ofstream(dir / "range.jsonl") << R"({"dialogue_id":"d1","system_id":"s","worker_id":"w","scores":{"Overall":6}})"
                                     << "\n";
  CHECK_THROWS_AS(load_annotations(dir / "range.jsonl"), ParseError);
  std::ofstream(dir / "dup.jsonl") << R"({"dialogue_id":"d1","system_id":"s","worker_id":"w","scores":{"Overall":4}})"
                                   << "\n"
                                   << R"({"dialogue_id":"d1","system_id":"s","worker_id":"w","scores":{"Overall":3}})"
                                   << "\n";
  CHECK_THROWS_AS(load_annotations(dir / "dup.jsonl"), ParseError);
}

TEST_CASE("convergence on separated and tied streams") {
  auto gen = RngStream{5}.engine();
  std::vector<PairStream> streams;
  for (int t = 0; t < 4; ++t) {
    for (int p = 0; p < 2; ++p) {
      PairStream s{"t" + std::to_string(t), "p" + std::to_string(p), {}};
      for (int i = 0; i < 400; ++i) s.scores.push_back(t + 0.5 * standard_normal(gen));
      streams.push_back(s);
    }
  }
  const auto c = convergence_point(streams, 50, 3);
  CHECK(c.converged);
  CHECK(c.dialogues_per_pair % 50 == 0);
  CHECK(c.ranking == std::vector<std::string>{"t3", "t2", "t1", "t0"});
  CHECK(convergence_point(streams, 50, 1).dialogues_per_pair <= c.dialogues_per_pair);
  CHECK_THROWS(convergence_point(streams, 500, 3));

  // Constant scores: identical ranking at every checkpoint from the first.
  std::vector<PairStream> flat = {{"a", "p", std::vector<double>(150, 2.0)}, {"b", "p", std::vector<double>(150, 1.0)}};
  const auto f = convergence_point(flat, 50, 3);
  CHECK(f.converged);
  CHECK(f.dialogues_per_pair == 50);
}
