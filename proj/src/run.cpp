#include "dialeval/run.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "dialeval/error.hpp"
#include "dialeval/jsonl.hpp"
#include "dialeval/stats.hpp"

#ifndef DIALEVAL_VERSION
#define DIALEVAL_VERSION "0.0.0"
#endif

namespace dialeval {

std::string_view tool_version() { return DIALEVAL_VERSION; }

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::apply_paper_defaults() {
  exchanges = 5;
  score_mode = ScoreMode::NegativesOnly;
  dimensions = default_dimensions();
  replicates = method == Method::SelfPlay ? 1000 : 600;
}

std::vector<SystemRef> RunConfig::roster() const {
  std::vector<SystemRef> all = targets;
  all.insert(all.end(), partners.begin(), partners.end());
  all.insert(all.end(), auxiliary.begin(), auxiliary.end());
  return all;
}

void RunConfig::validate() const {
  validate_roster(roster());
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (exchanges < 1) throw ConfigError("exchanges must be at least 1");
  if (concurrency < 1) throw ConfigError("concurrency must be at least 1");
  if (dimensions.empty()) throw ConfigError("at least one dimension must be scored");
  switch (method) {
    case Method::SelfPlay:
      if (targets.empty()) throw ConfigError("self-play requires at least one target");
      break;
    case Method::AllPlayAll:
      if (targets.size() < 2) throw ConfigError("all-play-all requires at least two targets");
      break;
    case Method::Bipartite:
      if (targets.empty() || partners.empty()) throw ConfigError("bipartite-play requires targets and partners");
      break;
  }
  if (method != Method::Bipartite && !partners.empty()) {
    throw ConfigError("partners are only used by bipartite-play");
  }
  if (backend.kind == BackendConfig::Kind::Remote) parse_endpoint(backend.endpoint);
}

namespace {

nlohmann::json backend_to_json(const BackendConfig& b) {
  nlohmann::json j;
  if (b.kind == BackendConfig::Kind::MockOverlap) {
    j = b.mock;
    j["type"] = "mock_overlap";
  } else {
    j = {{"type", "remote"}, {"endpoint", b.endpoint}};
    if (b.max_context_utterances) j["max_context_utterances"] = *b.max_context_utterances;
  }
  j["normalization"] = to_string(b.normalization);
  return j;
}

BackendConfig backend_from_json(const nlohmann::json& j) {
  BackendConfig b;
  const auto type = j.value("type", std::string("mock_overlap"));
  if (type == "mock_overlap") {
    b.kind = BackendConfig::Kind::MockOverlap;
    b.mock = j.get<MockOverlapSpec>();
  } else if (type == "remote") {
    b.kind = BackendConfig::Kind::Remote;
    b.endpoint = j.at("endpoint").get<std::string>();
    if (j.contains("max_context_utterances") && !j["max_context_utterances"].is_null()) {
      b.max_context_utterances = j["max_context_utterances"].get<std::size_t>();
    }
  } else {
    throw ConfigError("unknown backend type '" + type + "'");
  }
  b.normalization = parse_normalization(j.value("normalization", std::string("mean-log-prob")));
  return b;
}

std::string env_key(std::string_view id) {
  std::string key = "DIALEVAL_ENDPOINT_";
  for (unsigned char c : id) key += std::isalnum(c) ? static_cast<char>(std::toupper(c)) : '_';
  return key;
}

const char* getenv_nonempty(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  return v && *v ? v : nullptr;
}

}  // namespace

void to_json(nlohmann::json& j, const RunConfig& c) {
  std::vector<std::string> dims;
  for (const auto& d : c.dimensions) dims.push_back(d.name);
  j = {{"method", to_string(c.method)},
       {"targets", c.targets},
       {"partners", c.partners},
       {"auxiliary", c.auxiliary},
       {"replicates", c.replicates},
       {"exchanges", c.exchanges},
       {"dimensions", dims},
       {"score_mode", to_string(c.score_mode)},
       {"backend", backend_to_json(c.backend)},
       {"master_seed", c.master_seed},
       {"concurrency", c.concurrency},
       {"timeout_ms", c.timeout.count()},
       {"seed_corpus", c.seed_corpus.string()},
       {"response_sets", c.response_sets.string()}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  static const std::set<std::string> known = {"method",     "targets",     "partners",    "auxiliary",
                                              "replicates", "exchanges",   "dimensions",  "score_mode",
                                              "backend",    "master_seed", "concurrency", "timeout_ms",
                                              "seed_corpus", "response_sets", "paper_defaults"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  c = RunConfig{};
  c.method = parse_method(j.at("method").get<std::string>());
  c.targets = j.at("targets").get<std::vector<SystemRef>>();
  c.partners = j.value("partners", std::vector<SystemRef>{});
  c.auxiliary = j.value("auxiliary", std::vector<SystemRef>{});
  c.replicates = j.value("replicates", c.replicates);
  c.exchanges = j.value("exchanges", c.exchanges);
  if (j.contains("dimensions")) {
    c.dimensions.clear();
    for (const auto& d : j["dimensions"]) c.dimensions.push_back({d.get<std::string>()});
  }
  c.score_mode = parse_score_mode(j.value("score_mode", std::string("negatives-only")));
  if (j.contains("backend")) c.backend = backend_from_json(j["backend"]);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.concurrency = j.value("concurrency", c.concurrency);
  c.timeout = std::chrono::milliseconds{j.value("timeout_ms", std::int64_t{30000})};
  c.seed_corpus = j.at("seed_corpus").get<std::string>();
  c.response_sets = j.at("response_sets").get<std::string>();
  if (j.value("paper_defaults", false)) c.apply_paper_defaults();
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig config;
  try {
    config = nlohmann::json::parse(read_text(path)).get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  for (auto* p : {&config.seed_corpus, &config.response_sets}) {
    if (p->is_relative()) *p = fs::absolute(base / *p).lexically_normal();
  }
  return config;
}

void apply_env_overrides(RunConfig& config) {
  if (const char* v = getenv_nonempty("DIALEVAL_TIMEOUT_MS")) {
    config.timeout = std::chrono::milliseconds{std::stoll(v)};
  }
  if (const char* v = getenv_nonempty("DIALEVAL_SCORER_ENDPOINT")) {
    config.backend.kind = BackendConfig::Kind::Remote;
    config.backend.endpoint = v;
  }
  for (auto* list : {&config.targets, &config.partners, &config.auxiliary}) {
    for (auto& s : *list) {
      if (const char* v = getenv_nonempty(env_key(s.id))) s.bot_spec = RemoteBotSpec{v};
    }
  }
}

std::shared_ptr<const Scorer> make_scorer(const RunConfig& config) {
  std::shared_ptr<const ScoringBackend> backend;
  if (config.backend.kind == BackendConfig::Kind::MockOverlap) {
    backend = std::make_shared<MockOverlapBackend>(config.backend.mock);
  } else {
    backend = make_remote_backend(config.backend.endpoint, RemoteOptions{config.timeout},
                                  config.backend.max_context_utterances);
  }
  return std::make_shared<const Scorer>(backend, config.backend.normalization);
}

EvaluationSettings make_settings(const RunConfig& config) {
  EvaluationSettings s;
  s.roster = config.roster();
  s.bots = make_registry(s.roster, RemoteOptions{config.timeout});
  s.seeds = load_seed_corpus(config.seed_corpus);
  s.replicates = config.replicates;
  s.exchanges = config.exchanges;
  s.master_seed = config.master_seed;
  s.scorer = make_scorer(config);
  s.response_sets = load_response_sets(config.response_sets);
  s.mode = config.score_mode;
  s.concurrency = config.concurrency;
  return s;
}

// ---------------------------------------------------------------------------
// Manifest and run directory

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = {{"config", m.config},
       {"tool_version", m.tool_version},
       {"started_at", m.started_at},
       {"finished_at", m.finished_at},
       {"digests", m.digests},
       {"stages", m.stages}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
  m.config = j.at("config");
  m.tool_version = j.value("tool_version", std::string{});
  m.started_at = j.value("started_at", std::string{});
  m.finished_at = j.value("finished_at", std::string{});
  m.digests = j.value("digests", std::map<std::string, std::string>{});
  m.stages = j.value("stages", nlohmann::json::object());
}

RunDirectory::RunDirectory(fs::path root, bool create) : root_(std::move(root)), lock_(root_ / "run.lock") {
  if (create) {
    fs::create_directories(root_);
  } else if (!fs::is_directory(root_)) {
    throw ConfigError("run directory " + root_.string() + " does not exist");
  }
  const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    throw Error("run directory " + root_.string() + " is locked by another process (remove " + lock_.string() +
                " if stale)");
  }
  const auto pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
  try {
    if (has(kManifest)) {
      manifest_ = nlohmann::json::parse(read_text(file(kManifest))).get<RunManifest>();
    } else if (!create) {
      throw ConfigError("no manifest in " + root_.string() + "; run `plan` first");
    }
  } catch (...) {
    fs::remove(lock_);
    throw;
  }
}

RunDirectory::~RunDirectory() {
  std::error_code ec;
  fs::remove(lock_, ec);
}

bool RunDirectory::has(const std::string& name) const { return fs::exists(file(name)); }

RunConfig RunDirectory::config() const {
  if (manifest_.config.is_null()) throw ConfigError("manifest carries no config snapshot");
  return manifest_.config.get<RunConfig>();
}

void RunDirectory::save_manifest() {
  manifest_.tool_version = std::string(tool_version());
  manifest_.finished_at = utc_now();
  if (manifest_.started_at.empty()) manifest_.started_at = manifest_.finished_at;
  write_text_atomic(file(kManifest), nlohmann::json(manifest_).dump(2) + "\n");
}

void RunDirectory::write_artifact(const std::string& name, const std::string& contents) {
  write_text_atomic(file(name), contents);
  manifest_.digests[name] = sha256_hex(contents);
  save_manifest();
}

void RunDirectory::verify_artifact(const std::string& name) const {
  const auto it = manifest_.digests.find(name);
  if (it == manifest_.digests.end()) throw Error(name + " is not recorded in the manifest; run the stage producing it");
  if (!has(name)) throw Error(name + " is missing from " + root_.string());
  if (sha256_file(file(name)) != it->second) throw Error(name + " does not match its manifest digest");
}

std::vector<std::string> RunDirectory::verify_all() const {
  std::vector<std::string> bad;
  for (const auto& [name, _] : manifest_.digests) {
    try {
      verify_artifact(name);
    } catch (const Error&) {
      bad.push_back(name);
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Stages

namespace {

template <typename Range>
std::string jsonl_text(const Range& records) {
  std::string out;
  for (const auto& r : records) {
    out += nlohmann::json(r).dump();
    out += '\n';
  }
  return out;
}

template <typename T>
std::vector<T> read_verified(const RunDirectory& dir, const char* name) {
  dir.verify_artifact(name);
  return read_jsonl_as<T>(dir.file(name));
}

PairingPlan plan_with_roster(const RunDirectory& dir, const RunConfig& config) {
  dir.verify_artifact(RunDirectory::kPlan);
  auto plan = load_plan(dir.file(RunDirectory::kPlan));
  plan.targets = config.targets;
  plan.partners = config.partners;
  return plan;
}

}  // namespace

PairingPlan stage_plan(RunDirectory& dir, const RunConfig& config) {
  config.validate();
  const auto seeds = load_seed_corpus(config.seed_corpus);
  load_response_sets(config.response_sets);
  auto plan = make_plan(config.method, config.targets, config.partners, config.replicates, seeds, config.master_seed);
  check_plan(plan, seeds, config.replicates);

  auto& m = dir.manifest();
  m = RunManifest{};
  m.config = config;
  m.started_at = utc_now();
  m.stages["plan"] = {{"method", to_string(plan.method)},
                      {"targets", plan.targets.size()},
                      {"partners", plan.partners.size()},
                      {"replicates", config.replicates},
                      {"pairs", plan.tasks.size() / config.replicates},
                      {"tasks", plan.tasks.size()}};
  dir.write_artifact(RunDirectory::kPlan, jsonl_text([&] {
                       std::vector<nlohmann::json> rows;
                       for (const auto& t : plan.tasks) {
                         nlohmann::json j = t;
                         j["method"] = to_string(plan.method);
                         rows.push_back(std::move(j));
                       }
                       return rows;
                     }()));
  return plan;
}

CollectionSummary stage_collect(RunDirectory& dir, std::optional<std::size_t> concurrency) {
  const auto config = dir.config();
  auto settings = make_settings(config);
  const auto plan = plan_with_roster(dir, config);

  // Completed dialogues from an interrupted collect are kept; the rest rerun.
  const auto partial_path = dir.file("dialogues.partial.jsonl");
  std::map<std::string, Dialogue> done;
  if (fs::exists(partial_path)) {
    try {
      read_jsonl(partial_path, [&](const nlohmann::json& j, std::size_t) {
        auto d = j.get<Dialogue>();
        if (d.complete()) done.emplace(d.dialogue_id, std::move(d));
      });
    } catch (const ParseError&) {
      // A torn last line; everything before it was read.
    }
    std::vector<const Dialogue*> kept;
    for (const auto& [_, d] : done) kept.push_back(&d);
    std::string text;
    for (const auto* d : kept) text += nlohmann::json(*d).dump() + "\n";
    write_text_atomic(partial_path, text);
  }
  PairingPlan todo = plan;
  todo.tasks.clear();
  for (const auto& t : plan.tasks) {
    if (!done.count(make_dialogue_id(plan.method, t.target_id, t.partner_id, t.replicate_index))) {
      todo.tasks.push_back(t);
    }
  }

  std::ofstream partial(partial_path, std::ios::app);
  auto result = run_plan(todo, settings.bots, settings.seeds, config.exchanges, config.master_seed,
                         concurrency.value_or(config.concurrency), [&](const Dialogue& d) {
                           if (d.complete()) partial << nlohmann::json(d).dump() << '\n' << std::flush;
                         });
  partial.close();

  std::vector<Dialogue> all;
  all.reserve(plan.tasks.size());
  for (auto& [_, d] : done) all.push_back(std::move(d));
  for (auto& d : result.dialogues) all.push_back(std::move(d));
  std::sort(all.begin(), all.end(), [](const Dialogue& a, const Dialogue& b) {
    return std::tie(a.target_id, a.partner_id, a.replicate_index) <
           std::tie(b.target_id, b.partner_id, b.replicate_index);
  });
  CollectionSummary summary;
  std::map<std::string, std::size_t> failed_by_target;
  for (const auto& d : all) {
    check_dialogue(d, d.complete() ? std::optional<std::size_t>(config.exchanges) : std::nullopt);
    if (d.complete()) {
      ++summary.complete;
    } else {
      ++summary.failed;
      ++failed_by_target[d.target_id];
    }
  }
  dir.manifest().stages["collect"] = {{"complete", summary.complete},
                                      {"failed", summary.failed},
                                      {"failed_by_target", failed_by_target},
                                      {"resumed", done.size()}};
  dir.write_artifact(RunDirectory::kDialogues, jsonl_text(all));
  fs::remove(partial_path);
  return summary;
}

std::size_t stage_score(RunDirectory& dir, std::optional<std::size_t> concurrency) {
  const auto config = dir.config();
  const auto dialogues = read_verified<Dialogue>(dir, RunDirectory::kDialogues);
  const auto scorer = make_scorer(config);
  const auto sets = load_response_sets(config.response_sets);
  const auto records = score_dialogues(dialogues, config.dimensions, sets, config.score_mode, *scorer,
                                       concurrency.value_or(config.concurrency));
  dir.manifest().stages["score"] = {{"records", records.size()},
                                    {"backend", scorer->descriptor()},
                                    {"truncation_events", scorer->truncation_events()}};
  dir.write_artifact(RunDirectory::kScores, jsonl_text(records));
  return records.size();
}

std::vector<RankingReport> stage_rank(RunDirectory& dir) {
  const auto config = dir.config();
  const auto records = read_verified<ScoreRecord>(dir, RunDirectory::kScores);
  if (records.empty()) throw Error("scores.jsonl holds no score records; nothing to rank");
  std::vector<std::string> targets;
  for (const auto& t : config.targets) targets.push_back(t.id);
  std::vector<RankingReport> reports;
  for (const auto& dim : config.dimensions) {
    reports.push_back(rank_from_records(records, dim, std::string(to_string(config.method)), targets));
  }
  const nlohmann::json out = {{"method", to_string(config.method)}, {"rankings", reports}};
  dir.manifest().stages["rank"] = {{"dimensions", reports.size()}};
  dir.write_artifact(RunDirectory::kRankings, out.dump(2) + "\n");
  return reports;
}

namespace {

std::vector<RankingReport> load_rankings(const RunDirectory& dir) {
  dir.verify_artifact(RunDirectory::kRankings);
  return nlohmann::json::parse(read_text(dir.file(RunDirectory::kRankings)))
      .at("rankings")
      .get<std::vector<RankingReport>>();
}

}  // namespace

nlohmann::json stage_correlate(RunDirectory& dir, const fs::path& annotations_path) {
  const auto config = dir.config();
  const auto rankings = load_rankings(dir);
  const auto annotations = load_annotations(annotations_path);
  nlohmann::json out = {{"annotations", annotations_path.string()},
                        {"annotations_sha256", sha256_file(annotations_path)},
                        {"correlations", nlohmann::json::array()}};
  for (const auto& auto_rank : rankings) {
    std::vector<std::string> ranked;
    for (const auto& e : auto_rank.entries) ranked.push_back(e.system_id);
    const auto human = human_scores(annotations, auto_rank.dimension, ranked);
    std::vector<double> a, h;
    for (const auto& e : auto_rank.entries) {
      a.push_back(e.score);
      h.push_back(human.at(e.system_id));
    }
    const auto human_report = human_ranking(annotations, auto_rank.dimension, ranked);
    nlohmann::json row = {{"dimension", auto_rank.dimension.name},
                          {"systems", ranked.size()},
                          {"spearman", spearman(a, h)},
                          {"human_ranking", human_report}};
    try {
      row["split_half_agreement"] = split_half_agreement(
          annotations, auto_rank.dimension, RngStream{config.master_seed}.derive("split-half"));
    } catch (const Error& e) {
      row["split_half_agreement"] = nullptr;
      row["split_half_note"] = e.what();
    }
    out["correlations"].push_back(std::move(row));
  }
  dir.manifest().stages["correlate"] = {{"dimensions", rankings.size()}};
  dir.write_artifact(RunDirectory::kCorrelations, out.dump(2) + "\n");
  return out;
}

nlohmann::json stage_converge(RunDirectory& dir, std::size_t interval, std::size_t window) {
  const auto config = dir.config();
  const auto records = read_verified<ScoreRecord>(dir, RunDirectory::kScores);
  nlohmann::json out = {{"interval", interval}, {"window", window}, {"dimensions", nlohmann::json::array()}};
  for (const auto& dim : config.dimensions) {
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::size_t, double>>> pairs;
    for (const auto& r : records) {
      if (r.dimension == dim) pairs[{r.target_id, r.partner_id}].emplace_back(r.replicate_index, r.dialogue_score);
    }
    std::vector<PairStream> streams;
    for (auto& [key, scores] : pairs) {
      std::sort(scores.begin(), scores.end());
      PairStream s{key.first, key.second, {}};
      for (const auto& [_, v] : scores) s.scores.push_back(v);
      streams.push_back(std::move(s));
    }
    nlohmann::json row = {{"dimension", dim.name}};
    try {
      row["result"] = convergence_point(streams, interval, window);
    } catch (const Error& e) {
      row["error"] = e.what();
    }
    out["dimensions"].push_back(std::move(row));
  }
  dir.manifest().stages["converge"] = {{"interval", interval}, {"window", window}};
  dir.write_artifact(RunDirectory::kConvergence, out.dump(2) + "\n");
  return out;
}

nlohmann::json stage_cheat(RunDirectory& dir, const fs::path& scenarios_path) {
  const auto config = dir.config();
  const auto scenarios = load_scenarios(scenarios_path);
  const auto settings = make_settings(config);

  std::vector<RankingReport> fair;
  std::string fair_source;
  if (config.method == Method::AllPlayAll && dir.has(RunDirectory::kRankings)) {
    fair = load_rankings(dir);
    fair_source = "rankings.json";
  }
  const auto fair_for = [&](const Dimension& dim) -> const RankingReport& {
    for (const auto& r : fair) {
      if (r.dimension == dim) return r;
    }
    // No matching all-play-all ranking on disk: run the fair evaluation now.
    const auto plan = plan_all_play_all(config.targets, config.replicates, settings.seeds, config.master_seed);
    const std::array<Dimension, 1> dims{dim};
    fair.push_back(evaluate(plan, settings, dims).rankings.front());
    fair_source = "computed";
    return fair.back();
  };

  nlohmann::json out = {{"scenarios", scenarios_path.string()}, {"results", nlohmann::json::array()}};
  std::set<Dimension> dims;
  for (const auto& s : scenarios) dims.insert(s.dimension);
  FlipTable overall;
  for (const auto& dim : dims) {
    std::vector<CheatScenario> subset;
    for (const auto& s : scenarios) {
      if (s.dimension == dim) subset.push_back(s);
    }
    const RankingReport fair_rank = fair_for(dim);
    std::vector<ScenarioOutcome> outcomes;
    const auto table = flip_table(subset, fair_rank, settings, &outcomes);
    overall.fair_win_unfair_win += table.fair_win_unfair_win;
    overall.fair_win_unfair_lose += table.fair_win_unfair_lose;
    overall.fair_lose_unfair_win += table.fair_lose_unfair_win;
    overall.fair_lose_unfair_lose += table.fair_lose_unfair_lose;
    out["results"].push_back(
        {{"dimension", dim.name}, {"fair_ranking", fair_rank}, {"flip_table", table}, {"outcomes", outcomes}});
  }
  out["fair_ranking_source"] = fair_source;
  out["flip_table"] = overall;
  dir.manifest().stages["cheat"] = {{"scenarios", scenarios.size()}, {"flip_table", overall}};
  dir.write_artifact(RunDirectory::kCheatReport, out.dump(2) + "\n");
  return out;
}

namespace {

std::string fmt_num(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

std::string stage_report(RunDirectory& dir) {
  const auto config = dir.config();
  const auto& m = dir.manifest();
  std::ostringstream md;
  md << "# Evaluation run report\n\n";
  md << "- method: " << to_string(config.method) << "\n";
  md << "- targets: " << config.targets.size();
  if (config.method == Method::Bipartite) md << ", partners: " << config.partners.size();
  md << "\n";
  if (m.stages.contains("plan")) {
    const auto& p = m.stages["plan"];
    md << "- " << p["pairs"].get<std::size_t>() << " pairs x " << p["replicates"].get<std::size_t>()
       << " dialogues per pair = " << p["tasks"].get<std::size_t>() << " tasks\n";
  }
  md << "- exchanges per dialogue: " << config.exchanges << ", score mode: " << to_string(config.score_mode)
     << ", master seed: " << config.master_seed << "\n";
  if (m.stages.contains("collect")) {
    const auto& c = m.stages["collect"];
    md << "- dialogues: " << c["complete"].get<std::size_t>() << " complete, " << c["failed"].get<std::size_t>()
       << " failed\n";
  }
  if (m.stages.contains("score")) md << "- scoring backend: `" << m.stages["score"]["backend"].get<std::string>() << "`\n";

  if (dir.has(RunDirectory::kRankings)) {
    for (const auto& r : load_rankings(dir)) {
      md << "\n## Ranking: " << r.dimension.name << "\n\n| rank | system | score | dialogues |\n|---:|---|---:|---:|\n";
      for (const auto& e : r.entries) {
        md << "| " << fmt_num(e.rank, 1) << " | " << e.system_id << " | " << fmt_num(e.score) << " | "
           << e.m_effective << " |\n";
      }
      if (!r.unranked.empty()) {
        md << "\nUnranked (no complete dialogues):";
        for (const auto& u : r.unranked) md << " " << u;
        md << "\n";
      }
    }
  }
  if (dir.has(RunDirectory::kCorrelations)) {
    dir.verify_artifact(RunDirectory::kCorrelations);
    const auto c = nlohmann::json::parse(read_text(dir.file(RunDirectory::kCorrelations)));
    md << "\n## Correlation with human ranking\n\n| dimension | Spearman | split-half agreement |\n|---|---:|---:|\n";
    for (const auto& row : c["correlations"]) {
      md << "| " << row["dimension"].get<std::string>() << " | " << fmt_num(row["spearman"].get<double>(), 3) << " | "
         << (row["split_half_agreement"].is_null() ? std::string("n/a")
                                                   : fmt_num(row["split_half_agreement"].get<double>(), 3))
         << " |\n";
    }
  }
  if (dir.has(RunDirectory::kConvergence)) {
    dir.verify_artifact(RunDirectory::kConvergence);
    const auto c = nlohmann::json::parse(read_text(dir.file(RunDirectory::kConvergence)));
    md << "\n## Convergence (interval " << c["interval"] << ", window " << c["window"] << ")\n\n";
    for (const auto& row : c["dimensions"]) {
      md << "- " << row["dimension"].get<std::string>() << ": ";
      if (row.contains("error")) {
        md << row["error"].get<std::string>() << "\n";
      } else if (row["result"]["converged"].get<bool>()) {
        md << "converged at " << row["result"]["dialogues_per_pair"] << " dialogues per pair\n";
      } else {
        md << "not converged within " << row["result"]["dialogues_per_pair"] << " dialogues per pair\n";
      }
    }
  }
  if (dir.has(RunDirectory::kCheatReport)) {
    dir.verify_artifact(RunDirectory::kCheatReport);
    const auto c = nlohmann::json::parse(read_text(dir.file(RunDirectory::kCheatReport)));
    const auto t = c["flip_table"].get<FlipTable>();
    md << "\n## Unfair target sets (favored vs unfavored)\n\n| fair \\ unfair | favored wins | favored loses |\n"
       << "|---|---:|---:|\n"
       << "| favored wins | " << t.fair_win_unfair_win << " | " << t.fair_win_unfair_lose << " |\n"
       << "| favored loses | " << t.fair_lose_unfair_win << " | " << t.fair_lose_unfair_lose << " |\n";
  }
  const auto text = md.str();
  dir.manifest().stages["report"] = {{"bytes", text.size()}};
  dir.write_artifact(RunDirectory::kReport, text);
  return text;
}

}  // namespace dialeval
