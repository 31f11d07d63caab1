#include "dialeval/remote.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "dialeval/error.hpp"
#include "dialeval/fed.hpp"

namespace dialeval {

namespace wire {

std::string_view speaker_label(Role role) { return role == Role::Target ? "A" : "B"; }

nlohmann::json respond_request(std::string_view dialogue_id, Role respond_as, std::span<const Utterance> history) {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& u : history) turns.push_back({{"speaker", speaker_label(u.speaker)}, {"text", u.text}});
  return {{"dialogue_id", dialogue_id}, {"respond_as", speaker_label(respond_as)}, {"history", turns}};
}

nlohmann::json score_request(std::span<const std::string> context, std::string_view candidate) {
  return {{"context", std::vector<std::string>(context.begin(), context.end())}, {"candidate", candidate}};
}

std::vector<std::string> check_respond_response(const nlohmann::json& body) {
  if (!body.is_object()) return {"respond: body is not a JSON object"};
  if (!body.contains("text")) return {"respond: missing field 'text'"};
  if (!body["text"].is_string()) return {"respond: field 'text' must be a string"};
  if (body["text"].get_ref<const std::string&>().empty()) return {"respond: field 'text' must be non-empty"};
  return {};
}

std::vector<std::string> check_score_response(const nlohmann::json& body) {
  if (!body.is_object()) return {"score: body is not a JSON object"};
  std::vector<std::string> v;
  if (!body.contains("total_log_likelihood")) {
    v.push_back("score: missing field 'total_log_likelihood'");
  } else if (!body["total_log_likelihood"].is_number()) {
    v.push_back("score: field 'total_log_likelihood' must be a number");
  } else if (!std::isfinite(body["total_log_likelihood"].get<double>())) {
    v.push_back("score: total_log_likelihood must be finite");
  }
  if (!body.contains("token_count")) {
    v.push_back("score: missing field 'token_count'");
  } else if (!body["token_count"].is_number_integer()) {
    v.push_back("score: field 'token_count' must be an integer");
  } else if (body["token_count"].get<std::int64_t>() < 1) {
    v.push_back("score: token_count must be >= 1");
  }
  return v;
}

std::vector<std::string> check_health_response(const nlohmann::json& body) {
  if (!body.is_object()) return {"health: body is not a JSON object"};
  std::vector<std::string> v;
  if (!body.contains("status")) {
    v.push_back("health: missing field 'status'");
  } else if (body["status"] != "ok") {
    v.push_back("health: status must be \"ok\"");
  }
  if (!body.contains("model")) {
    v.push_back("health: missing field 'model'");
  } else if (!body["model"].is_string()) {
    v.push_back("health: field 'model' must be a string");
  }
  return v;
}

}  // namespace wire

JsonHttpClient::JsonHttpClient(const std::string& endpoint, std::chrono::milliseconds timeout)
    : endpoint_(parse_endpoint(endpoint)), timeout_(timeout) {
  if (endpoint_.scheme != "http") throw ConfigError("only http endpoints are supported: " + endpoint);
}

namespace {

httplib::Client make_client(const Endpoint& ep, std::chrono::milliseconds timeout) {
  httplib::Client cli(ep.host, ep.port);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  return cli;
}

nlohmann::json decode(const httplib::Result& res, const Endpoint& ep, const std::string& path) {
  const std::string where = ep.url() + path;
  if (!res) throw RetryableError("transport error contacting " + where + ": " + httplib::to_string(res.error()));
  if (res->status >= 500) throw RetryableError(where + " answered HTTP " + std::to_string(res->status));
  if (res->status != 200) throw ProtocolError(where + " answered HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(where + " returned invalid JSON: " + e.what());
  }
}

}  // namespace

nlohmann::json JsonHttpClient::get(const std::string& path) const {
  auto cli = make_client(endpoint_, timeout_);
  return decode(cli.Get(endpoint_.base_path + path), endpoint_, path);
}

nlohmann::json JsonHttpClient::post(const std::string& path, const nlohmann::json& body) const {
  auto cli = make_client(endpoint_, timeout_);
  return decode(cli.Post(endpoint_.base_path + path, body.dump(), "application/json"), endpoint_, path);
}

namespace {

template <typename Fn>
auto with_retries(const RemoteOptions& options, Fn&& fn) {
  auto backoff = options.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const RetryableError& e) {
      if (attempt >= options.max_attempts) {
        throw RetryableError(std::string(e.what()) + " (after " + std::to_string(attempt) + " attempts)");
      }
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
}

void raise_violations(const std::vector<std::string>& v) {
  if (v.empty()) return;
  std::string msg;
  for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw ProtocolError(msg);
}

class RemoteBot final : public Bot {
 public:
  RemoteBot(const std::string& endpoint, RemoteOptions options)
      : client_(endpoint, options.timeout), options_(options) {}

  std::string respond(const BotRequest& request, RngStream) const override {
    const auto body = wire::respond_request(request.dialogue_id, request.respond_as, request.history);
    return with_retries(options_, [&] {
      const auto reply = client_.post("/v1/respond", body);
      raise_violations(wire::check_respond_response(reply));
      return reply["text"].get<std::string>();
    });
  }

  HealthStatus health() const override {
    const auto reply = client_.get("/v1/health");
    raise_violations(wire::check_health_response(reply));
    return {true, reply["model"].get<std::string>()};
  }

 private:
  JsonHttpClient client_;
  RemoteOptions options_;
};

class RemoteScoringBackend final : public ScoringBackend {
 public:
  RemoteScoringBackend(const std::string& endpoint, RemoteOptions options, std::optional<std::size_t> max_context)
      : client_(endpoint, options.timeout), options_(options), max_context_(max_context) {}

  Likelihood score(std::span<const std::string> context, std::string_view candidate) const override {
    const auto body = wire::score_request(context, candidate);
    return with_retries(options_, [&] {
      const auto reply = client_.post("/v1/score", body);
      raise_violations(wire::check_score_response(reply));
      return Likelihood{reply["total_log_likelihood"].get<double>(), reply["token_count"].get<std::int64_t>()};
    });
  }

  std::string descriptor() const override { return "remote:" + client_.endpoint().url(); }
  std::optional<std::size_t> max_context_utterances() const override { return max_context_; }

 private:
  JsonHttpClient client_;
  RemoteOptions options_;
  std::optional<std::size_t> max_context_;
};

}  // namespace

std::shared_ptr<const Bot> make_remote_bot(const std::string& endpoint, const RemoteOptions& options) {
  return std::make_shared<RemoteBot>(endpoint, options);
}

std::shared_ptr<const ScoringBackend> make_remote_backend(const std::string& endpoint, const RemoteOptions& options,
                                                          std::optional<std::size_t> max_context) {
  return std::make_shared<RemoteScoringBackend>(endpoint, options, max_context);
}

const nlohmann::json& golden_fixtures() {
  static const nlohmann::json fixtures = nlohmann::json::parse(R"({
    "respond": [
      {"dialogue_id": "fixture-1", "respond_as": "A",
       "history": [{"speaker": "A", "text": "I just got back from a long trip."},
                   {"speaker": "B", "text": "Welcome back! Where did you go?"}]},
      {"dialogue_id": "fixture-2", "respond_as": "B",
       "history": [{"speaker": "A", "text": "My dog learned a new trick today."},
                   {"speaker": "B", "text": "That is great, which trick?"},
                   {"speaker": "A", "text": "He can roll over now."}]}
    ],
    "score": [
      {"context": ["I just got back from a long trip.", "Welcome back! Where did you go?", "I went hiking in the mountains."],
       "candidate": "That's a very generic response."},
      {"context": ["My dog learned a new trick today."], "candidate": "That makes no sense!"}
    ]
  })");
  return fixtures;
}

bool ConformanceReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<std::string> ConformanceReport::violations() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.name + ": " + c.detail);
  }
  return out;
}

std::string ConformanceReport::render() const {
  std::ostringstream os;
  os << "backend " << endpoint << '\n';
  for (const auto& c : checks) {
    os << (c.passed ? "  PASS " : "  FAIL ") << c.name;
    if (!c.detail.empty()) os << " - " << c.detail;
    os << '\n';
  }
  os << (ok() ? "conformant" : "NOT conformant") << '\n';
  return os.str();
}

ConformanceReport validate_backend(const std::string& endpoint, std::chrono::milliseconds timeout) {
  ConformanceReport report{endpoint, {}};
  const JsonHttpClient client(endpoint, timeout);

  const auto run = [&](std::string name, auto&& fn) {
    ConformanceCheck check{std::move(name), false, {}};
    try {
      const std::vector<std::string> v = fn();
      check.passed = v.empty();
      for (const auto& s : v) check.detail += (check.detail.empty() ? "" : "; ") + s;
    } catch (const std::exception& e) {
      check.detail = e.what();
    }
    report.checks.push_back(std::move(check));
  };

  run("GET /v1/health", [&] { return wire::check_health_response(client.get("/v1/health")); });

  const auto& fx = golden_fixtures();
  for (std::size_t i = 0; i < fx["respond"].size(); ++i) {
    run("POST /v1/respond fixture " + std::to_string(i + 1),
        [&] { return wire::check_respond_response(client.post("/v1/respond", fx["respond"][i])); });
  }
  for (std::size_t i = 0; i < fx["score"].size(); ++i) {
    const auto& req = fx["score"][i];
    run("POST /v1/score fixture " + std::to_string(i + 1),
        [&] { return wire::check_score_response(client.post("/v1/score", req)); });
  }
  run("POST /v1/score determinism", [&] {
    const auto& req = fx["score"][0];
    const auto a = client.post("/v1/score", req);
    const auto b = client.post("/v1/score", req);
    return a == b ? std::vector<std::string>{}
                  : std::vector<std::string>{"score: identical requests returned different responses"};
  });
  return report;
}

}  // namespace dialeval
