#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dialeval/error.hpp"
#include "dialeval/remote.hpp"
#include "dialeval/run.hpp"

namespace fs = std::filesystem;
using namespace dialeval;

namespace {

struct Options {
  std::string config;
  std::string run_dir;
  bool paper_defaults = false;
  std::size_t concurrency = 0;
  std::string annotations;
  std::size_t interval = 50;
  std::size_t window = 3;
  std::string scenarios;
  std::string endpoint;
  long timeout_ms = 30000;
};

std::optional<std::size_t> concurrency_of(const Options& o) {
  if (o.concurrency == 0) return std::nullopt;
  return o.concurrency;
}

int cmd_plan(const Options& o) {
  auto config = load_run_config(o.config);
  if (o.paper_defaults) config.apply_paper_defaults();
  apply_env_overrides(config);
  if (o.concurrency) config.concurrency = o.concurrency;
  RunDirectory dir(o.run_dir, true);
  const auto plan = stage_plan(dir, config);
  std::cout << "planned " << plan.tasks.size() << " dialogues (" << to_string(plan.method) << ") in "
            << dir.root().string() << "\n";
  return 0;
}

int cmd_collect(const Options& o) {
  RunDirectory dir(o.run_dir);
  const auto s = stage_collect(dir, concurrency_of(o));
  std::cout << "collected " << s.complete << " complete, " << s.failed << " failed dialogues\n";
  return 0;
}

int cmd_score(const Options& o) {
  RunDirectory dir(o.run_dir);
  const auto n = stage_score(dir, concurrency_of(o));
  std::cout << "wrote " << n << " score records\n";
  return 0;
}

int cmd_rank(const Options& o) {
  RunDirectory dir(o.run_dir);
  for (const auto& r : stage_rank(dir)) {
    std::cout << r.dimension.name << ":";
    for (const auto& e : r.entries) std::cout << " " << e.system_id;
    std::cout << "\n";
  }
  return 0;
}

int cmd_correlate(const Options& o) {
  RunDirectory dir(o.run_dir);
  const auto out = stage_correlate(dir, o.annotations);
  for (const auto& row : out["correlations"]) {
    std::cout << row["dimension"].get<std::string>() << ": spearman " << row["spearman"].get<double>() << "\n";
  }
  return 0;
}

int cmd_converge(const Options& o) {
  RunDirectory dir(o.run_dir);
  const auto out = stage_converge(dir, o.interval, o.window);
  std::cout << out["dimensions"].dump(2) << "\n";
  return 0;
}

int cmd_cheat(const Options& o) {
  RunDirectory dir(o.run_dir);
  const auto out = stage_cheat(dir, o.scenarios);
  std::cout << out["flip_table"].dump(2) << "\n";
  return 0;
}

int cmd_report(const Options& o) {
  RunDirectory dir(o.run_dir);
  std::cout << stage_report(dir);
  return 0;
}

int cmd_verify(const Options& o) {
  RunDirectory dir(o.run_dir);
  const auto bad = dir.verify_all();
  for (const auto& name : bad) std::cerr << "digest mismatch or missing: " << name << "\n";
  if (bad.empty()) std::cout << "all artifacts match the manifest\n";
  return bad.empty() ? 0 : 1;
}

int cmd_validate_backend(const Options& o) {
  const auto report = validate_backend(o.endpoint, std::chrono::milliseconds{o.timeout_ms});
  std::cout << report.render();
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-bot dialogue evaluation pipeline"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  Options o;

  auto add_run_dir = [&](CLI::App* sub) { sub->add_option("--run-dir", o.run_dir, "Run directory")->required(); };
  auto add_concurrency = [&](CLI::App* sub) {
    sub->add_option("--concurrency", o.concurrency, "Worker threads (default: from config)");
  };

  auto* plan = app.add_subcommand("plan", "Validate a config and write the pairing plan");
  plan->add_option("--config", o.config, "Run config JSON")->required()->check(CLI::ExistingFile);
  plan->add_flag("--paper-defaults", o.paper_defaults, "1000 dialogues per pair for self-play, 600 otherwise");
  add_run_dir(plan);
  add_concurrency(plan);

  auto* collect = app.add_subcommand("collect", "Run the planned dialogues (resumable)");
  add_run_dir(collect);
  add_concurrency(collect);

  auto* score = app.add_subcommand("score", "Rate every complete dialogue");
  add_run_dir(score);
  add_concurrency(score);

  auto* rank = app.add_subcommand("rank", "Aggregate scores into per-dimension rankings");
  add_run_dir(rank);

  auto* correlate = app.add_subcommand("correlate", "Compare rankings with human annotations");
  add_run_dir(correlate);
  correlate->add_option("--annotations", o.annotations, "Annotation JSONL")->required()->check(CLI::ExistingFile);

  auto* converge = app.add_subcommand("converge", "Find the number of dialogues at which the ranking stabilizes");
  add_run_dir(converge);
  converge->add_option("--interval", o.interval, "Checkpoint spacing in dialogues per pair")
      ->check(CLI::PositiveNumber);
  converge->add_option("--window", o.window, "Consecutive identical checkpoints required")->check(CLI::PositiveNumber);

  auto* cheat = app.add_subcommand("cheat-sim", "Evaluate unfair target sets and tally ranking flips");
  add_run_dir(cheat);
  cheat->add_option("--scenarios", o.scenarios, "Scenario JSONL")->required()->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Render report.md from the run's artifacts");
  add_run_dir(report);

  auto* verify = app.add_subcommand("verify", "Check every artifact against the manifest digests");
  add_run_dir(verify);

  auto* validate = app.add_subcommand("validate-backend", "Check a remote service against the wire protocol");
  validate->add_option("--endpoint", o.endpoint, "Base URL, e.g. http://127.0.0.1:8080")->required();
  validate->add_option("--timeout-ms", o.timeout_ms, "Per-request timeout")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) return cmd_plan(o);
    if (*collect) return cmd_collect(o);
    if (*score) return cmd_score(o);
    if (*rank) return cmd_rank(o);
    if (*correlate) return cmd_correlate(o);
    if (*converge) return cmd_converge(o);
    if (*cheat) return cmd_cheat(o);
    if (*report) return cmd_report(o);
    if (*verify) return cmd_verify(o);
    if (*validate) return cmd_validate_backend(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
