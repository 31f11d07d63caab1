#include <algorithm>
#include <array>
#include <mutex>
#include <set>
#include <unordered_set>

#include "dialeval/bot.hpp"
#include "dialeval/error.hpp"

namespace dialeval {

namespace synthetic {

namespace {

const std::vector<std::string> kGeneric = {"i",    "think", "that", "is",    "nice", "you",  "know",
                                           "really", "good", "okay", "yeah", "so",   "well", "maybe",
                                           "it",   "thing", "stuff", "sure", "like", "just"};

const std::unordered_set<std::string_view>& generic_set() {
  static const std::unordered_set<std::string_view> set(kGeneric.begin(), kGeneric.end());
  return set;
}

constexpr std::array<std::string_view, 16> kOnsets = {"b", "d", "f", "g", "k", "l", "m", "n",
                                                      "p", "r", "s", "t", "v", "z", "br", "kr"};
constexpr std::array<std::string_view, 6> kVowels = {"a", "e", "i", "o", "u", "ae"};
constexpr std::array<std::string_view, 8> kCodas = {"", "n", "r", "s", "x", "l", "th", "m"};

}  // namespace

std::span<const std::string> generic_words() { return kGeneric; }

bool is_generic(std::string_view token) { return generic_set().count(token) > 0; }

std::vector<std::string> vocabulary(std::uint64_t vocabulary_seed) {
  auto gen = RngStream{vocabulary_seed}.derive("vocabulary").engine();
  std::set<std::string> seen;
  std::vector<std::string> words;
  while (words.size() < 64) {
    std::string w;
    const std::size_t syllables = 2 + uniform_index(gen, 2);
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kOnsets[uniform_index(gen, kOnsets.size())];
      w += kVowels[uniform_index(gen, kVowels.size())];
      w += kCodas[uniform_index(gen, kCodas.size())];
    }
    if (!is_generic(w) && seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

double specificity_density(std::string_view text) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) return 0.0;
  const auto specific = std::count_if(tokens.begin(), tokens.end(), [](const auto& t) { return !is_generic(t); });
  return static_cast<double>(specific) / static_cast<double>(tokens.size());
}

double adjacent_overlap(std::string_view previous, std::string_view current) {
  const auto prev = tokenize(previous);
  const auto cur = tokenize(current);
  if (cur.empty()) return 0.0;
  const std::set<std::string> prev_set(prev.begin(), prev.end());
  const auto shared = std::count_if(cur.begin(), cur.end(), [&](const auto& t) { return prev_set.count(t) > 0; });
  return static_cast<double>(shared) / static_cast<double>(cur.size());
}

}  // namespace synthetic

namespace {

std::string sentence(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  out += '.';
  return out;
}

class EchoBot final : public Bot {
 public:
  std::string respond(const BotRequest& request, RngStream) const override { return request.history.back().text; }
  HealthStatus health() const override { return {true, "echo"}; }
};

class TemplateBot final : public Bot {
 public:
  std::string respond(const BotRequest& request, RngStream stream) const override {
    static constexpr std::array<std::string_view, 5> kTemplates = {
        "Tell me more about {}.", "Why do you say {}?", "I see, {} sounds interesting.",
        "What do you like about {}?", "Do you often think about {}?"};
    auto gen = stream.engine();
    const auto tokens = tokenize(request.history.back().text);
    const std::string topic = tokens.empty() ? std::string("that") : tokens[uniform_index(gen, tokens.size())];
    std::string_view tmpl = kTemplates[uniform_index(gen, kTemplates.size())];
    const auto slot = tmpl.find("{}");
    return std::string(tmpl.substr(0, slot)) + topic + std::string(tmpl.substr(slot + 2));
  }
  HealthStatus health() const override { return {true, "template"}; }
};

// Emits fixed-length sentences mixing its own vocabulary (specific) with
// shared filler (generic) at rate `quality`. When the partner's last turn is
// mostly from the same vocabulary, it copies a run of the partner's words
// with probability `repetition_affinity`.
class QualityBot final : public Bot {
 public:
  explicit QualityBot(const ScriptedBotSpec& spec)
      : spec_(spec), vocabulary_(synthetic::vocabulary(spec.vocabulary_seed)),
        vocabulary_set_(vocabulary_.begin(), vocabulary_.end()) {}

  std::string respond(const BotRequest& request, RngStream stream) const override {
    auto gen = stream.engine();
    std::vector<std::string> out;
    out.reserve(synthetic::kUtteranceTokens);

    const auto last = tokenize(request.history.back().text);
    if (shares_vocabulary(last) && uniform01(gen) < spec_.repetition_affinity) {
      const std::size_t n = std::min(synthetic::kCopyLength, last.size());
      const std::size_t start = uniform_index(gen, last.size() - n + 1);
      out.insert(out.end(), last.begin() + static_cast<std::ptrdiff_t>(start),
                 last.begin() + static_cast<std::ptrdiff_t>(start + n));
    }
    const auto generic = synthetic::generic_words();
    while (out.size() < synthetic::kUtteranceTokens) {
      if (uniform01(gen) < spec_.quality) {
        out.push_back(vocabulary_[uniform_index(gen, vocabulary_.size())]);
      } else {
        out.push_back(generic[uniform_index(gen, generic.size())]);
      }
    }
    return sentence(out);
  }

  HealthStatus health() const override { return {true, "quality"}; }

 private:
  bool shares_vocabulary(std::span<const std::string> tokens) const {
    std::size_t specific = 0;
    std::size_t mine = 0;
    for (const auto& t : tokens) {
      if (synthetic::is_generic(t)) continue;
      ++specific;
      mine += vocabulary_set_.count(t);
    }
    return specific > 0 && 2 * mine >= specific;
  }

  ScriptedBotSpec spec_;
  std::vector<std::string> vocabulary_;
  std::set<std::string, std::less<>> vocabulary_set_;
};

}  // namespace

std::shared_ptr<const Bot> make_scripted_bot(const ScriptedBotSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ScriptedKind::Echo: return std::make_shared<EchoBot>();
    case ScriptedKind::Template: return std::make_shared<TemplateBot>();
    case ScriptedKind::Quality: return std::make_shared<QualityBot>(spec);
  }
  throw ConfigError("unknown scripted bot kind");
}

std::shared_ptr<const Bot> make_bot(const SystemRef& system, const RemoteOptions& options) {
  if (const auto* remote = std::get_if<RemoteBotSpec>(&system.bot_spec)) {
    return make_remote_bot(remote->endpoint, options);
  }
  return make_scripted_bot(std::get<ScriptedBotSpec>(system.bot_spec));
}

BotRegistry make_registry(std::span<const SystemRef> systems, const RemoteOptions& options) {
  BotRegistry registry;
  for (const auto& s : systems) {
    if (registry.count(s.id)) throw ConfigError("duplicate bot handle for '" + s.id + "'");
    registry.emplace(s.id, BotHandle{s.id, make_bot(s, options)});
  }
  return registry;
}

std::string respond(const BotHandle& handle, const BotRequest& request, RngStream stream) {
  if (request.history.empty()) throw Error("respond called with empty history for " + handle.system_id);
  auto text = handle.bot->respond(request, stream);
  if (text.empty()) throw ProtocolError(handle.system_id + " returned empty text");
  return text;
}

HealthStatus health_check(const BotHandle& handle) { return handle.bot->health(); }

}  // namespace dialeval
