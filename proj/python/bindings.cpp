#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dialeval/error.hpp"
#include "dialeval/jsonl.hpp"
#include "dialeval/mock_server.hpp"
#include "dialeval/remote.hpp"
#include "dialeval/run.hpp"

namespace py = pybind11;
using namespace dialeval;

namespace {

std::vector<SystemRef> refs(const std::vector<std::string>& ids) {
  std::vector<SystemRef> out;
  for (const auto& id : ids) out.push_back({id, id, ScriptedBotSpec{}});
  return out;
}

std::vector<DialogueSeed> seeds_of(const std::vector<std::string>& ids) {
  std::vector<DialogueSeed> out;
  for (const auto& id : ids) out.push_back({id, "-", "-"});
  return out;
}

std::string plan_json(const std::string& method, const std::vector<std::string>& targets,
                      const std::vector<std::string>& partners, std::size_t replicates,
                      const std::vector<std::string>& seed_ids, std::uint64_t master_seed) {
  const auto t = refs(targets);
  const auto p = refs(partners);
  const auto plan = make_plan(parse_method(method), t, p, replicates, seeds_of(seed_ids), master_seed);
  return nlohmann::json(plan.tasks).dump();
}

std::size_t pair_count(const std::string& method, std::size_t targets, std::size_t replicates, std::size_t partners) {
  switch (parse_method(method)) {
    case Method::SelfPlay: return self_play_count(targets, replicates);
    case Method::AllPlayAll: return all_play_all_count(targets, replicates);
    case Method::Bipartite: return bipartite_count(targets, partners, replicates);
  }
  return 0;
}

std::string rank_json(const std::map<std::string, double>& scores, const std::string& dimension) {
  return nlohmann::json(rank_systems(scores, Dimension{dimension})).dump();
}

std::pair<double, std::int64_t> mock_likelihood(const std::vector<std::string>& context, const std::string& candidate,
                                                const std::string& spec_json) {
  const MockOverlapBackend backend(nlohmann::json::parse(spec_json).get<MockOverlapSpec>());
  const auto l = backend.score(context, candidate);
  return {l.total_log_likelihood, l.token_count};
}

double fed_score(const std::vector<std::string>& context, const std::string& response,
                 const std::vector<std::string>& positives, const std::vector<std::string>& negatives,
                 const std::string& mode, const std::string& spec_json, const std::string& normalization) {
  auto backend = std::make_shared<MockOverlapBackend>(nlohmann::json::parse(spec_json).get<MockOverlapSpec>());
  const Scorer scorer(backend, parse_normalization(normalization));
  std::vector<Utterance> ctx;
  for (std::size_t i = 0; i < context.size(); ++i) ctx.push_back({i, role_at(i), "", context[i], Origin::Generated});
  const ResponseSet rs{Dimension{"custom"}, positives, negatives};
  return score_utterance(ctx, response, rs, parse_score_mode(mode), scorer);
}

std::string run_pipeline(const std::string& config_path, const std::string& run_dir, std::size_t concurrency,
                         const std::string& annotations) {
  py::gil_scoped_release release;
  auto config = load_run_config(config_path);
  apply_env_overrides(config);
  {
    RunDirectory dir(run_dir, true);
    stage_plan(dir, config);
  }
  RunDirectory dir(run_dir);
  const std::optional<std::size_t> c = concurrency ? std::optional<std::size_t>(concurrency) : std::nullopt;
  stage_collect(dir, c);
  stage_score(dir, c);
  stage_rank(dir);
  if (!annotations.empty()) stage_correlate(dir, annotations);
  stage_report(dir);
  return read_text(dir.file(RunDirectory::kRankings));
}

std::string validate_json(const std::string& endpoint, long timeout_ms) {
  py::gil_scoped_release release;
  const auto report = validate_backend(endpoint, std::chrono::milliseconds{timeout_ms});
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return nlohmann::json{{"endpoint", report.endpoint}, {"ok", report.ok()}, {"checks", checks}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dialogue system evaluation core";
  m.attr("__version__") = std::string(tool_version());

  // Translators run newest first, so the base class goes in before its subclasses.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def("pair_count", &pair_count, py::arg("method"), py::arg("targets"), py::arg("replicates"),
        py::arg("partners") = 0);
  m.def("_plan_json", &plan_json, py::arg("method"), py::arg("targets"), py::arg("partners"), py::arg("replicates"),
        py::arg("seed_ids"), py::arg("master_seed") = 0);
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); });
  m.def("_rank_json", &rank_json, py::arg("scores"), py::arg("dimension") = "Overall");
  m.def("_mock_likelihood", &mock_likelihood);
  m.def("_fed_score", &fed_score);
  m.def("_run_pipeline", &run_pipeline, py::arg("config"), py::arg("run_dir"), py::arg("concurrency") = 0,
        py::arg("annotations") = "");
  m.def("_validate_backend", &validate_json, py::arg("endpoint"), py::arg("timeout_ms") = 30000);
  m.def("sha256_hex", &sha256_hex);

  py::class_<MockServer>(m, "MockServer")
      .def(py::init([](const std::string& bot_json, const std::string& model) {
             MockServerOptions o;
             if (!bot_json.empty()) o.bot = nlohmann::json::parse(bot_json).get<ScriptedBotSpec>();
             o.model = model;
             return std::make_unique<MockServer>(o);
           }),
           py::arg("bot_json") = "", py::arg("model") = "mock-shim")
      .def("start", &MockServer::start, py::arg("port") = 0, py::call_guard<py::gil_scoped_release>())
      .def("stop", &MockServer::stop, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("endpoint", &MockServer::endpoint)
      .def_property_readonly("requests", &MockServer::requests);
}
