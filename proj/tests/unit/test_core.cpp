#include <doctest.h>

#include <fstream>

#include "dialeval/core.hpp"
#include "dialeval/error.hpp"
#include "temp_dir.hpp"

using namespace dialeval;

TEST_CASE("enum strings round-trip") {
  for (auto m : {Method::SelfPlay, Method::AllPlayAll, Method::Bipartite}) CHECK(parse_method(to_string(m)) == m);
  CHECK(to_string(Method::AllPlayAll) == "all-play-all");
  CHECK(parse_role("target") == Role::Target);
  CHECK(parse_origin("seed") == Origin::Seed);
  CHECK_THROWS_AS(parse_method("round-robin"), ConfigError);
  CHECK(parse_scripted_kind("quality") == ScriptedKind::Quality);
}

TEST_CASE("endpoint parsing") {
  auto e = parse_endpoint("http://127.0.0.1:8080/api/");
  CHECK(e.scheme == "http");
  CHECK(e.host == "127.0.0.1");
  CHECK(e.port == 8080);
  CHECK(e.base_path == "/api");
  CHECK(parse_endpoint("http://bots.local").port == 80);
  CHECK_THROWS_AS(parse_endpoint("bots.local:80"), ConfigError);
  CHECK_THROWS_AS(parse_endpoint("http://:80"), ConfigError);
  CHECK_THROWS_AS(parse_endpoint("http://host:notaport"), ConfigError);
}

TEST_CASE("roles alternate and the target owns even indices") {
  CHECK(role_at(0) == Role::Target);
  CHECK(role_at(1) == Role::Partner);
  CHECK(role_at(10) == Role::Target);
  CHECK(dialogue_length(5) == 12);
}

namespace {

Dialogue sample_dialogue(std::size_t exchanges) {
  Dialogue d;
  d.dialogue_id = make_dialogue_id(Method::Bipartite, "a", "b", 0);
  d.target_id = "a";
  d.partner_id = "b";
  d.seed_id = "s";
  for (std::size_t i = 0; i < dialogue_length(exchanges); ++i) {
    d.utterances.push_back({i, role_at(i), role_at(i) == Role::Target ? "a" : "b", "turn " + std::to_string(i),
                            i < 2 ? Origin::Seed : Origin::Generated});
  }
  return d;
}

}  // namespace

TEST_CASE("context_of returns the strict prefix") {
  const auto d = sample_dialogue(2);
  CHECK(context_of(d, 0).empty());
  CHECK(context_of(d, 3).size() == 3);
  CHECK(context_of(d, 3).back().index == 2);
  CHECK_THROWS(context_of(d, d.utterances.size()));
}

TEST_CASE("check_dialogue catches structural defects") {
  auto d = sample_dialogue(5);
  CHECK_NOTHROW(check_dialogue(d, 5));
  CHECK_THROWS(check_dialogue(d, 4));
  auto swapped = d;
  swapped.utterances[3].speaker = Role::Target;
  CHECK_THROWS(check_dialogue(swapped));
  auto wrong_origin = d;
  wrong_origin.utterances[1].origin = Origin::Generated;
  CHECK_THROWS(check_dialogue(wrong_origin));
  auto gap = d;
  gap.utterances[4].index = 7;
  CHECK_THROWS(check_dialogue(gap));
  auto failed = d;
  failed.utterances.resize(5);
  failed.status = DialogueStatus::failed("b at turn 5: timeout");
  CHECK_NOTHROW(check_dialogue(failed, 5));
}

TEST_CASE("dialogue json round-trip") {
  auto d = sample_dialogue(1);
  d.status = DialogueStatus::failed("boom");
  const nlohmann::json j = d;
  CHECK(j["status"] == "failed");
  CHECK(j["failure_reason"] == "boom");
  CHECK(j["utterances"][0]["speaker"] == "target");
  CHECK(j.get<Dialogue>() == d);
}

TEST_CASE("seed corpus loading") {
  testing::TempDir dir;
  const auto path = dir / "seeds.jsonl";
  std::vector<DialogueSeed> seeds = {{"s1", "Hello there.", "Hi!"}, {"s2", "How are you?", "Fine."}};
  save_seed_corpus(path, seeds);
  const auto back = load_seed_corpus(path);
  REQUIRE(back.size() == 2);
  CHECK(back[1].second_text == "Fine.");

  std::ofstream(dir / "blank.jsonl") << R"({"seed_id":"s1","first_text":"Hi","second_text":"Yo"})" << "\n"
                                     << R"({"seed_id":"s2","first_text":"   ","second_text":"Yo"})" << "\n";
  try {
    load_seed_corpus(dir / "blank.jsonl");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::ofstream(dir / "empty.jsonl") << "\n";
  CHECK_THROWS_AS(load_seed_corpus(dir / "empty.jsonl"), ParseError);
}

TEST_CASE("tokenize lowercases word runs") {
  const auto t = tokenize("Don't STOP, 42 times!");
  CHECK(t == std::vector<std::string>{"don't", "stop", "42", "times"});
  CHECK(tokenize("...").empty());
}

TEST_CASE("roster validation") {
  std::vector<SystemRef> roster = {{"a", "A", ScriptedBotSpec{}}, {"b", "B", RemoteBotSpec{"http://h:1"}}};
  CHECK_NOTHROW(validate_roster(roster));
  roster.push_back({"a", "dup", ScriptedBotSpec{}});
  CHECK_THROWS_AS(validate_roster(roster), ConfigError);
  roster.pop_back();
  roster.push_back({"c", "C", ScriptedBotSpec{ScriptedKind::Quality, 1.5, 0.0, 0}});
  CHECK_THROWS_AS(validate_roster(roster), ConfigError);
}

TEST_CASE("system json round-trip") {
  SystemRef s{"q", "Q", ScriptedBotSpec{ScriptedKind::Quality, 0.25, 0.5, 9}};
  const nlohmann::json j = s;
  CHECK(j["bot"]["type"] == "scripted");
  const auto back = j.get<SystemRef>();
  CHECK(std::get<ScriptedBotSpec>(back.bot_spec) == std::get<ScriptedBotSpec>(s.bot_spec));
  const auto r = nlohmann::json::parse(R"({"id":"x","bot":{"type":"remote","endpoint":"http://h:9"}})")
                     .get<SystemRef>();
  CHECK(r.display_name == "x");
  CHECK(std::get<RemoteBotSpec>(r.bot_spec).endpoint == "http://h:9");
}
