#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/cheat.hpp"
#include "dialeval/evaluation.hpp"
#include "dialeval/mock_backend.hpp"

namespace dialeval {

std::string_view tool_version();

struct BackendConfig {
  enum class Kind { MockOverlap, Remote };

  Kind kind = Kind::MockOverlap;
  MockOverlapSpec mock;
  std::string endpoint;
  std::optional<std::size_t> max_context_utterances;
  Normalization normalization = Normalization::MeanLogProb;
};

struct RunConfig {
  Method method = Method::Bipartite;
  std::vector<SystemRef> targets;
  std::vector<SystemRef> partners;   // bipartite only
  std::vector<SystemRef> auxiliary;  // extra systems cheat scenarios may draw on
  std::size_t replicates = 1;
  std::size_t exchanges = 5;
  std::vector<Dimension> dimensions = default_dimensions();
  ScoreMode score_mode = ScoreMode::NegativesOnly;
  BackendConfig backend;
  std::uint64_t master_seed = 0;
  std::size_t concurrency = 8;
  std::chrono::milliseconds timeout{30000};
  std::filesystem::path seed_corpus;
  std::filesystem::path response_sets;

  // 1000 dialogues per pair for self-play, 600 otherwise.
  void apply_paper_defaults();
  void validate() const;
  std::vector<SystemRef> roster() const;
};

// Relative paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);

// DIALEVAL_TIMEOUT_MS, DIALEVAL_SCORER_ENDPOINT and DIALEVAL_ENDPOINT_<ID>
// (id upper-cased, non-alphanumerics as '_') replace configured values.
void apply_env_overrides(RunConfig& config);

std::shared_ptr<const Scorer> make_scorer(const RunConfig& config);
EvaluationSettings make_settings(const RunConfig& config);

struct RunManifest {
  nlohmann::json config;
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
  std::map<std::string, std::string> digests;  // artifact file name -> sha256 hex
  nlohmann::json stages = nlohmann::json::object();
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// One run directory, owned through a lock file for the object's lifetime.
class RunDirectory {
 public:
  static constexpr const char* kManifest = "manifest.json";
  static constexpr const char* kPlan = "plan.jsonl";
  static constexpr const char* kDialogues = "dialogues.jsonl";
  static constexpr const char* kScores = "scores.jsonl";
  static constexpr const char* kRankings = "rankings.json";
  static constexpr const char* kCorrelations = "correlations.json";
  static constexpr const char* kConvergence = "convergence.json";
  static constexpr const char* kCheatReport = "cheat_report.json";
  static constexpr const char* kReport = "report.md";

  explicit RunDirectory(std::filesystem::path root, bool create = false);
  ~RunDirectory();
  RunDirectory(const RunDirectory&) = delete;
  RunDirectory& operator=(const RunDirectory&) = delete;

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path file(const std::string& name) const { return root_ / name; }
  bool has(const std::string& name) const;

  RunManifest& manifest() { return manifest_; }
  const RunManifest& manifest() const { return manifest_; }
  RunConfig config() const;

  // Writes an artifact, records its digest and saves the manifest.
  void write_artifact(const std::string& name, const std::string& contents);
  // Throws when the file on disk no longer matches the recorded digest.
  void verify_artifact(const std::string& name) const;
  // Every recorded artifact; returns the names that fail verification.
  std::vector<std::string> verify_all() const;
  void save_manifest();

 private:
  std::filesystem::path root_;
  std::filesystem::path lock_;
  RunManifest manifest_;
};

// Pipeline stages. Each reads its inputs from the run directory, verifies
// them against the manifest and writes one artifact.
PairingPlan stage_plan(RunDirectory& dir, const RunConfig& config);
CollectionSummary stage_collect(RunDirectory& dir, std::optional<std::size_t> concurrency = std::nullopt);
std::size_t stage_score(RunDirectory& dir, std::optional<std::size_t> concurrency = std::nullopt);
std::vector<RankingReport> stage_rank(RunDirectory& dir);
nlohmann::json stage_correlate(RunDirectory& dir, const std::filesystem::path& annotations);
nlohmann::json stage_converge(RunDirectory& dir, std::size_t interval, std::size_t window);
nlohmann::json stage_cheat(RunDirectory& dir, const std::filesystem::path& scenarios);
std::string stage_report(RunDirectory& dir);

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);
void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

}  // namespace dialeval
