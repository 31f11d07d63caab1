#include <doctest.h>

#include "dialeval/engine.hpp"
#include "dialeval/error.hpp"
#include "dialeval/mock_server.hpp"
#include "dialeval/remote.hpp"
#include "synthetic.hpp"

using namespace dialeval;
using namespace std::chrono_literals;

namespace {

RemoteOptions quick() { return {2000ms, 3, 5ms}; }

std::vector<Utterance> history() {
  return {{0, Role::Target, "a", "Hello there, how are you?", Origin::Seed},
          {1, Role::Partner, "b", "Fine, I went swimming today.", Origin::Seed}};
}

}  // namespace

TEST_CASE("wire encoding") {
  const auto h = history();
  const auto req = wire::respond_request("d1", Role::Target, h);
  CHECK(req["respond_as"] == "A");
  CHECK(req["history"][1]["speaker"] == "B");
  CHECK(req["history"][0]["text"] == "Hello there, how are you?");
  const std::vector<std::string> ctx = {"x", "y"};
  const auto s = wire::score_request(ctx, "z");
  CHECK(s["context"].size() == 2);
  CHECK(s["candidate"] == "z");
}

TEST_CASE("schema checks") {
  CHECK(wire::check_respond_response({{"text", "hi"}}).empty());
  CHECK(wire::check_respond_response({{"reply", "hi"}}) == std::vector<std::string>{"respond: missing field 'text'"});
  CHECK_FALSE(wire::check_respond_response({{"text", ""}}).empty());
  CHECK(wire::check_score_response({{"total_log_likelihood", -3.5}, {"token_count", 2}}).empty());
  CHECK_FALSE(wire::check_score_response({{"total_log_likelihood", -3.5}, {"token_count", 0}}).empty());
  CHECK_FALSE(wire::check_score_response({{"token_count", 2}}).empty());
  CHECK(wire::check_health_response({{"status", "ok"}, {"model", "m"}}).empty());
  CHECK_FALSE(wire::check_health_response({{"status", "down"}, {"model", "m"}}).empty());
}

TEST_CASE("remote bot and scorer against the mock service") {
  MockServer server;
  server.start();
  const auto bot = make_remote_bot(server.endpoint(), quick());
  const auto h = history();
  const auto text = bot->respond({"d1", Role::Target, h}, RngStream{0});
  CHECK_FALSE(text.empty());
  CHECK(bot->respond({"d1", Role::Target, h}, RngStream{0}) == text);
  CHECK(bot->health().ok);
  CHECK(bot->health().model == "mock-shim");

  const auto backend = make_remote_backend(server.endpoint(), quick());
  const MockOverlapBackend local(MockOverlapSpec{});
  const std::vector<std::string> ctx = {"we like the sea", "the sea is calm"};
  const auto remote_l = backend->score(ctx, "the sea");
  const auto local_l = local.score(ctx, "the sea");
  CHECK(remote_l.total_log_likelihood == doctest::Approx(local_l.total_log_likelihood).epsilon(1e-12));
  CHECK(remote_l.token_count == local_l.token_count);
  server.stop();
}

TEST_CASE("transient failures are retried") {
  MockServerOptions o;
  o.fail_first_requests = 2;
  MockServer server(o);
  server.start();
  const auto bot = make_remote_bot(server.endpoint(), quick());
  const auto h = history();
  CHECK_FALSE(bot->respond({"d1", Role::Target, h}, RngStream{0}).empty());
  CHECK(server.requests() == 3);
}

TEST_CASE("persistent failures surface as errors") {
  MockServerOptions o;
  o.fault = MockServerOptions::Fault::ServerError;
  MockServer server(o);
  server.start();
  const auto h = history();
  CHECK_THROWS_AS(make_remote_bot(server.endpoint(), quick())->respond({"d1", Role::Target, h}, RngStream{0}),
                  RetryableError);
  CHECK(server.requests() == 3);
}

TEST_CASE("malformed replies are protocol errors") {
  MockServerOptions o;
  o.fault = MockServerOptions::Fault::OmitText;
  MockServer server(o);
  server.start();
  const auto h = history();
  CHECK_THROWS_AS(make_remote_bot(server.endpoint(), quick())->respond({"d1", Role::Target, h}, RngStream{0}),
                  ProtocolError);
  CHECK(server.requests() == 1);
}

TEST_CASE("unreachable endpoints") {
  const auto h = history();
  const auto bot = make_remote_bot("http://127.0.0.1:1", {200ms, 2, 1ms});
  CHECK_THROWS_AS(bot->respond({"d1", Role::Target, h}, RngStream{0}), RetryableError);
  CHECK_THROWS_AS(make_remote_bot("ftp://x", quick()), ConfigError);
}

TEST_CASE("conformance validator") {
  MockServer good;
  good.start();
  const auto ok = validate_backend(good.endpoint(), 2000ms);
  CHECK(ok.ok());
  CHECK(ok.violations().empty());
  CHECK(ok.render().find("PASS") != std::string::npos);

  MockServerOptions zero;
  zero.fault = MockServerOptions::Fault::ZeroTokenCount;
  MockServer bad(zero);
  bad.start();
  const auto report = validate_backend(bad.endpoint(), 2000ms);
  CHECK_FALSE(report.ok());
  bool named = false;
  for (const auto& v : report.violations()) named |= v.find("token_count must be >= 1") != std::string::npos;
  CHECK(named);

  MockServerOptions omit;
  omit.fault = MockServerOptions::Fault::OmitText;
  MockServer no_text(omit);
  no_text.start();
  bool missing = false;
  for (const auto& v : validate_backend(no_text.endpoint(), 2000ms).violations()) {
    missing |= v.find("missing field 'text'") != std::string::npos;
  }
  CHECK(missing);
  CHECK(golden_fixtures().contains("respond"));
}

TEST_CASE("remote targets in a collection run") {
  MockServerOptions o;
  o.bot = {ScriptedKind::Quality, 0.6, 0.0, 7};
  MockServer server(o);
  server.start();
  std::vector<SystemRef> targets = {{"remote", "", RemoteBotSpec{server.endpoint()}}};
  std::vector<SystemRef> partners = {testing::quality_system("p", 0.5, 0, 1)};
  auto all = targets;
  all.push_back(partners[0]);
  const auto bots = make_registry(all, quick());
  const auto seeds = testing::synthetic_seeds();
  const auto plan = plan_bipartite(targets, partners, 3, seeds, 1);
  const auto a = run_plan(plan, bots, seeds, 3, 1, 3);
  CHECK(a.summary.complete == 3);
  CHECK(run_plan(plan, bots, seeds, 3, 1, 1).dialogues == a.dialogues);
}
