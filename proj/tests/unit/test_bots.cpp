#include <doctest.h>

#include <set>

#include "dialeval/bot.hpp"
#include "dialeval/error.hpp"

using namespace dialeval;

namespace {

std::vector<Utterance> history_of(std::vector<std::string> texts) {
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out.push_back({i, role_at(i), role_at(i) == Role::Target ? "a" : "b", texts[i], i < 2 ? Origin::Seed : Origin::Generated});
  }
  return out;
}

BotHandle handle(ScriptedBotSpec spec) { return {"x", make_scripted_bot(spec)}; }

}  // namespace

TEST_CASE("echo repeats the last utterance") {
  const auto h = history_of({"first", "second one"});
  CHECK(respond(handle({ScriptedKind::Echo}), {"d", Role::Target, h}, RngStream{1}) == "second one");
}

TEST_CASE("template bot picks a topic from the last utterance") {
  const auto h = history_of({"hi", "I love mountains"});
  const auto bot = handle({ScriptedKind::Template});
  std::set<std::string> seen;
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto text = respond(bot, {"d", Role::Target, h}, RngStream{k});
    const auto tokens = tokenize(text);
    const bool has_topic = std::find_if(tokens.begin(), tokens.end(), [](const auto& t) {
                             return t == "i" || t == "love" || t == "mountains";
                           }) != tokens.end();
    CHECK(has_topic);
    seen.insert(text);
  }
  CHECK(seen.size() > 3);
}

TEST_CASE("responses depend only on the stream") {
  const auto h = history_of({"hi", "hello"});
  const auto bot = handle({ScriptedKind::Quality, 0.7, 0.0, 3});
  CHECK(respond(bot, {"d", Role::Target, h}, RngStream{5}) == respond(bot, {"d", Role::Target, h}, RngStream{5}));
  CHECK(respond(bot, {"d", Role::Target, h}, RngStream{5}) != respond(bot, {"d", Role::Target, h}, RngStream{6}));
}

TEST_CASE("quality controls specificity density") {
  const auto h = history_of({"hi", "hello"});
  auto density = [&](double q) {
    const auto bot = handle({ScriptedKind::Quality, q, 0.0, 1});
    double sum = 0;
    for (std::uint64_t k = 0; k < 400; ++k) {
      sum += synthetic::specificity_density(respond(bot, {"d", Role::Target, h}, RngStream{k}));
    }
    return sum / 400;
  };
  const double lo = density(0.2), mid = density(0.5), hi = density(0.9);
  CHECK(lo == doctest::Approx(0.2).epsilon(0.15));
  CHECK(hi == doctest::Approx(0.9).epsilon(0.05));
  CHECK(lo < mid);
  CHECK(mid < hi);
  CHECK(density(0.0) == 0.0);
  CHECK(density(1.0) == 1.0);
}

TEST_CASE("quality bot output shape") {
  const auto h = history_of({"hi", "hello"});
  const auto text = respond(handle({ScriptedKind::Quality, 0.5, 0.0, 2}), {"d", Role::Target, h}, RngStream{1});
  CHECK(tokenize(text).size() == synthetic::kUtteranceTokens);
  CHECK(text.back() == '.');
  CHECK(std::isupper(static_cast<unsigned char>(text.front())));
}

TEST_CASE("copying happens only on a shared vocabulary") {
  const auto vocab = synthetic::vocabulary(4);
  const auto other = synthetic::vocabulary(5);
  const std::string own_turn = vocab[0] + " " + vocab[1] + " " + vocab[2] + " " + vocab[3] + " " + vocab[4];
  const std::string foreign_turn = other[0] + " " + other[1] + " " + other[2] + " " + other[3] + " " + other[4];
  const auto copier = handle({ScriptedKind::Quality, 0.0, 1.0, 4});
  // quality 0 means any specific token in the reply was copied.
  const auto own = respond(copier, {"d", Role::Target, history_of({"hi", own_turn})}, RngStream{1});
  CHECK(synthetic::adjacent_overlap(own_turn, own) >= 0.5 - 1e-12);
  const auto foreign = respond(copier, {"d", Role::Target, history_of({"hi", foreign_turn})}, RngStream{1});
  CHECK(synthetic::adjacent_overlap(foreign_turn, foreign) == 0.0);
  const auto shy = handle({ScriptedKind::Quality, 0.0, 0.0, 4});
  CHECK(synthetic::adjacent_overlap(own_turn, respond(shy, {"d", Role::Target, history_of({"hi", own_turn})},
                                                      RngStream{1})) == 0.0);
}

TEST_CASE("synthetic vocabularies") {
  const auto a = synthetic::vocabulary(1);
  CHECK(a.size() == 64);
  CHECK(a == synthetic::vocabulary(1));
  CHECK(a != synthetic::vocabulary(2));
  for (const auto& w : a) CHECK_FALSE(synthetic::is_generic(w));
  CHECK(synthetic::specificity_density("i think " + a[0]) == doctest::Approx(1.0 / 3));
}

TEST_CASE("respond rejects empty histories and empty replies") {
  class Silent final : public Bot {
   public:
    std::string respond(const BotRequest&, RngStream) const override { return ""; }
    HealthStatus health() const override { return {true, "silent"}; }
  };
  const BotHandle silent{"s", std::make_shared<Silent>()};
  const auto h = history_of({"a", "b"});
  CHECK_THROWS_AS(respond(silent, {"d", Role::Target, h}, RngStream{1}), ProtocolError);
  CHECK_THROWS(respond(handle({ScriptedKind::Echo}), {"d", Role::Target, {}}, RngStream{1}));
  CHECK(health_check(handle({ScriptedKind::Echo})).ok);
}

TEST_CASE("registry rejects duplicates") {
  std::vector<SystemRef> roster = {{"a", "", ScriptedBotSpec{}}, {"a", "", ScriptedBotSpec{}}};
  CHECK_THROWS_AS(make_registry(roster), ConfigError);
}
