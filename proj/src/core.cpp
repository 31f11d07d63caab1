#include "dialeval/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "dialeval/error.hpp"
#include "dialeval/jsonl.hpp"

namespace dialeval {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::pair<std::string_view, E> (&table)[N], const char* what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw ConfigError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::pair<std::string_view, Role> kRoles[] = {{"target", Role::Target},
                                                        {"partner", Role::Partner}};
constexpr std::pair<std::string_view, Origin> kOrigins[] = {{"seed", Origin::Seed},
                                                            {"generated", Origin::Generated}};
constexpr std::pair<std::string_view, Method> kMethods[] = {{"self-play", Method::SelfPlay},
                                                            {"all-play-all", Method::AllPlayAll},
                                                            {"bipartite", Method::Bipartite}};
constexpr std::pair<std::string_view, ScriptedKind> kKinds[] = {{"echo", ScriptedKind::Echo},
                                                                {"template", ScriptedKind::Template},
                                                                {"quality", ScriptedKind::Quality}};

bool has_text(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return !std::isspace(c); });
}

}  // namespace

std::string_view to_string(Role role) { return role == Role::Target ? "target" : "partner"; }
std::string_view to_string(Origin origin) { return origin == Origin::Seed ? "seed" : "generated"; }
std::string_view to_string(Method method) {
  switch (method) {
    case Method::SelfPlay: return "self-play";
    case Method::AllPlayAll: return "all-play-all";
    case Method::Bipartite: return "bipartite";
  }
  return "?";
}
std::string_view to_string(ScriptedKind kind) {
  switch (kind) {
    case ScriptedKind::Echo: return "echo";
    case ScriptedKind::Template: return "template";
    case ScriptedKind::Quality: return "quality";
  }
  return "?";
}

Role parse_role(std::string_view s) { return parse_enum(s, kRoles, "role"); }
Origin parse_origin(std::string_view s) { return parse_enum(s, kOrigins, "origin"); }
Method parse_method(std::string_view s) { return parse_enum(s, kMethods, "method"); }
ScriptedKind parse_scripted_kind(std::string_view s) { return parse_enum(s, kKinds, "scripted bot kind"); }

std::string Endpoint::url() const {
  return scheme + "://" + host + ":" + std::to_string(port) + base_path;
}

Endpoint parse_endpoint(std::string_view url) {
  const auto bad = [&](const char* why) {
    return ConfigError("invalid endpoint URL '" + std::string(url) + "': " + why);
  };
  Endpoint ep;
  const auto sep = url.find("://");
  if (sep == std::string_view::npos) throw bad("missing scheme");
  ep.scheme = std::string(url.substr(0, sep));
  if (ep.scheme != "http" && ep.scheme != "https") throw bad("scheme must be http or https");
  ep.port = ep.scheme == "https" ? 443 : 80;
  auto rest = url.substr(sep + 3);
  const auto slash_it = std::find(rest.begin(), rest.end(), '/');
  const auto slash = static_cast<std::size_t>(slash_it - rest.begin());
  auto authority = rest.substr(0, slash);
  if (slash_it != rest.end()) {
    ep.base_path = std::string(rest.substr(slash));
    while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
  }
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    const auto port_str = authority.substr(colon + 1);
    int port = 0;
    const auto [ptr, ec] = std::from_chars(port_str.data(), port_str.data() + port_str.size(), port);
    if (ec != std::errc{} || ptr != port_str.data() + port_str.size() || port <= 0 || port > 65535) {
      throw bad("bad port");
    }
    ep.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw bad("missing host");
  for (unsigned char c : authority) {
    if (!(std::isalnum(c) || c == '.' || c == '-' || c == '_' || c == '[' || c == ']' || c == ':')) {
      throw bad("bad host character");
    }
  }
  ep.host = std::string(authority);
  return ep;
}

void ScriptedBotSpec::validate() const {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(quality)) throw ConfigError("quality must lie in [0, 1]");
  if (!in_unit(repetition_affinity)) throw ConfigError("repetition_affinity must lie in [0, 1]");
}

void validate_roster(std::span<const SystemRef> systems) {
  std::set<std::string_view> seen;
  for (const auto& s : systems) {
    if (s.id.empty()) throw ConfigError("system id must not be empty");
    if (!seen.insert(s.id).second) throw ConfigError("duplicate system id '" + s.id + "'");
    if (const auto* remote = std::get_if<RemoteBotSpec>(&s.bot_spec)) {
      parse_endpoint(remote->endpoint);
    } else {
      std::get<ScriptedBotSpec>(s.bot_spec).validate();
    }
  }
}

std::span<const Utterance> context_of(const Dialogue& dialogue, std::size_t index) {
  if (index >= dialogue.utterances.size()) {
    throw Error("context index " + std::to_string(index) + " out of range for dialogue of " +
                std::to_string(dialogue.utterances.size()) + " utterances");
  }
  return std::span<const Utterance>(dialogue.utterances).first(index);
}

void check_dialogue(const Dialogue& d, std::optional<std::size_t> exchanges) {
  const auto fail = [&](const std::string& why) { return Error("dialogue " + d.dialogue_id + ": " + why); };
  for (std::size_t i = 0; i < d.utterances.size(); ++i) {
    const auto& u = d.utterances[i];
    if (u.index != i) throw fail("utterance indices are not contiguous");
    if (u.speaker != role_at(i)) throw fail("speakers do not alternate");
    if (u.origin != (i < 2 ? Origin::Seed : Origin::Generated)) throw fail("bad origin at " + std::to_string(i));
    const auto& owner = u.speaker == Role::Target ? d.target_id : d.partner_id;
    if (u.system_id != owner) throw fail("utterance " + std::to_string(i) + " attributed to wrong system");
    if (u.text.empty()) throw fail("empty utterance text");
  }
  if (d.complete() && exchanges && d.utterances.size() != dialogue_length(*exchanges)) {
    throw fail("complete dialogue has " + std::to_string(d.utterances.size()) + " utterances, expected " +
               std::to_string(dialogue_length(*exchanges)));
  }
}

std::vector<DialogueSeed> load_seed_corpus(const std::filesystem::path& path) {
  std::vector<DialogueSeed> seeds;
  read_jsonl(path, [&](const nlohmann::json& j, std::size_t line) {
    auto seed = j.get<DialogueSeed>();
    if (seed.seed_id.empty()) throw ParseError(path.string(), line, "empty seed_id");
    if (!has_text(seed.first_text)) throw ParseError(path.string(), line, "blank first_text");
    if (!has_text(seed.second_text)) throw ParseError(path.string(), line, "blank second_text");
    seeds.push_back(std::move(seed));
  });
  if (seeds.empty()) throw ParseError(path.string(), 0, "no seeds");
  return seeds;
}

void save_seed_corpus(const std::filesystem::path& path, std::span<const DialogueSeed> seeds) {
  write_jsonl(path, seeds);
}

std::string make_dialogue_id(Method method, std::string_view target, std::string_view partner,
                             std::size_t replicate) {
  std::string id(to_string(method));
  id += '/';
  id += target;
  id += '/';
  id += partner;
  id += '/';
  id += std::to_string(replicate);
  return id;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void to_json(nlohmann::json& j, const Utterance& u) {
  j = {{"index", u.index},
       {"speaker", to_string(u.speaker)},
       {"system_id", u.system_id},
       {"text", u.text},
       {"origin", to_string(u.origin)}};
}

void from_json(const nlohmann::json& j, Utterance& u) {
  u.index = j.at("index").get<std::size_t>();
  u.speaker = parse_role(j.at("speaker").get<std::string>());
  u.system_id = j.at("system_id").get<std::string>();
  u.text = j.at("text").get<std::string>();
  u.origin = parse_origin(j.at("origin").get<std::string>());
}

void to_json(nlohmann::json& j, const DialogueSeed& s) {
  j = {{"seed_id", s.seed_id}, {"first_text", s.first_text}, {"second_text", s.second_text}};
}

void from_json(const nlohmann::json& j, DialogueSeed& s) {
  s.seed_id = j.at("seed_id").get<std::string>();
  s.first_text = j.at("first_text").get<std::string>();
  s.second_text = j.at("second_text").get<std::string>();
}

void to_json(nlohmann::json& j, const Dialogue& d) {
  j = {{"dialogue_id", d.dialogue_id},
       {"target_id", d.target_id},
       {"partner_id", d.partner_id},
       {"seed_id", d.seed_id},
       {"method", to_string(d.method)},
       {"replicate_index", d.replicate_index},
       {"status", d.complete() ? "complete" : "failed"},
       {"utterances", d.utterances}};
  if (!d.complete()) j["failure_reason"] = d.status.reason;
}

void from_json(const nlohmann::json& j, Dialogue& d) {
  d.dialogue_id = j.at("dialogue_id").get<std::string>();
  d.target_id = j.at("target_id").get<std::string>();
  d.partner_id = j.at("partner_id").get<std::string>();
  d.seed_id = j.at("seed_id").get<std::string>();
  d.method = parse_method(j.at("method").get<std::string>());
  d.replicate_index = j.at("replicate_index").get<std::size_t>();
  d.utterances = j.at("utterances").get<std::vector<Utterance>>();
  const auto status = j.at("status").get<std::string>();
  if (status == "complete") {
    d.status = DialogueStatus::ok();
  } else if (status == "failed") {
    d.status = DialogueStatus::failed(j.value("failure_reason", std::string{}));
  } else {
    throw Error("unknown dialogue status '" + status + "'");
  }
}

void to_json(nlohmann::json& j, const ScriptedBotSpec& s) {
  j = {{"type", "scripted"},
       {"kind", to_string(s.kind)},
       {"quality", s.quality},
       {"repetition_affinity", s.repetition_affinity},
       {"vocabulary_seed", s.vocabulary_seed}};
}

void from_json(const nlohmann::json& j, ScriptedBotSpec& s) {
  s.kind = parse_scripted_kind(j.at("kind").get<std::string>());
  s.quality = j.value("quality", 0.5);
  s.repetition_affinity = j.value("repetition_affinity", 0.0);
  s.vocabulary_seed = j.value("vocabulary_seed", std::uint64_t{0});
}

void to_json(nlohmann::json& j, const SystemRef& s) {
  j = {{"id", s.id}, {"display_name", s.display_name}};
  if (const auto* remote = std::get_if<RemoteBotSpec>(&s.bot_spec)) {
    j["bot"] = {{"type", "remote"}, {"endpoint", remote->endpoint}};
  } else {
    j["bot"] = std::get<ScriptedBotSpec>(s.bot_spec);
  }
}

void from_json(const nlohmann::json& j, SystemRef& s) {
  s.id = j.at("id").get<std::string>();
  s.display_name = j.value("display_name", s.id);
  const auto& bot = j.at("bot");
  const auto type = bot.at("type").get<std::string>();
  if (type == "remote") {
    s.bot_spec = RemoteBotSpec{bot.at("endpoint").get<std::string>()};
  } else if (type == "scripted") {
    s.bot_spec = bot.get<ScriptedBotSpec>();
  } else {
    throw ConfigError("unknown bot type '" + type + "' for system '" + s.id + "'");
  }
}

}  // namespace dialeval
