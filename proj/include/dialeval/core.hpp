#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace dialeval {

enum class Role { Target, Partner };
enum class Origin { Seed, Generated };
enum class Method { SelfPlay, AllPlayAll, Bipartite };

std::string_view to_string(Role role);
std::string_view to_string(Origin origin);
std::string_view to_string(Method method);
Role parse_role(std::string_view s);
Origin parse_origin(std::string_view s);
Method parse_method(std::string_view s);

// Host/port split of an http(s) URL. Only plain http is spoken on the wire.
struct Endpoint {
  std::string scheme;
  std::string host;
  int port = 80;
  std::string base_path;  // no trailing slash

  std::string url() const;
};

// Throws ConfigError on anything that is not scheme://host[:port][/path].
Endpoint parse_endpoint(std::string_view url);

enum class ScriptedKind { Echo, Template, Quality };

std::string_view to_string(ScriptedKind kind);
ScriptedKind parse_scripted_kind(std::string_view s);

struct ScriptedBotSpec {
  ScriptedKind kind = ScriptedKind::Echo;
  double quality = 0.5;              // [0, 1], QualityBot only
  double repetition_affinity = 0.0;  // [0, 1]
  std::uint64_t vocabulary_seed = 0;

  void validate() const;
  bool operator==(const ScriptedBotSpec&) const = default;
};

struct RemoteBotSpec {
  std::string endpoint;
  bool operator==(const RemoteBotSpec&) const = default;
};

using BotSpec = std::variant<RemoteBotSpec, ScriptedBotSpec>;

struct SystemRef {
  std::string id;
  std::string display_name;
  BotSpec bot_spec;
};

// Ids unique, remote endpoints well formed, scripted parameters in range.
void validate_roster(std::span<const SystemRef> systems);

struct Utterance {
  std::size_t index = 0;
  Role speaker = Role::Target;
  std::string system_id;
  std::string text;
  Origin origin = Origin::Generated;

  bool operator==(const Utterance&) const = default;
};

struct DialogueSeed {
  std::string seed_id;
  std::string first_text;
  std::string second_text;
};

struct DialogueStatus {
  bool complete = true;
  std::string reason;  // set when !complete

  static DialogueStatus ok() { return {}; }
  static DialogueStatus failed(std::string why) { return {false, std::move(why)}; }
  bool operator==(const DialogueStatus&) const = default;
};

struct Dialogue {
  std::string dialogue_id;
  std::string target_id;
  std::string partner_id;
  std::string seed_id;
  Method method = Method::Bipartite;
  std::size_t replicate_index = 0;
  std::vector<Utterance> utterances;
  DialogueStatus status;

  bool complete() const { return status.complete; }
  bool operator==(const Dialogue&) const = default;
};

// Role that speaks at a given position. Seeds follow the same alternation,
// so the Target owns every even index.
constexpr Role role_at(std::size_t index) { return index % 2 == 0 ? Role::Target : Role::Partner; }

constexpr std::size_t dialogue_length(std::size_t exchanges) { return 2 + 2 * exchanges; }

// Utterances strictly before `index`.
std::span<const Utterance> context_of(const Dialogue& dialogue, std::size_t index);

// Checks index contiguity, alternation, seed/generated origins and, for
// complete dialogues with a known exchange count, the length.
void check_dialogue(const Dialogue& dialogue, std::optional<std::size_t> exchanges = std::nullopt);

std::vector<DialogueSeed> load_seed_corpus(const std::filesystem::path& path);
void save_seed_corpus(const std::filesystem::path& path, std::span<const DialogueSeed> seeds);

std::string make_dialogue_id(Method method, std::string_view target, std::string_view partner,
                             std::size_t replicate);

// Lowercased alphanumeric/apostrophe runs.
std::vector<std::string> tokenize(std::string_view text);

void to_json(nlohmann::json& j, const Utterance& u);
void from_json(const nlohmann::json& j, Utterance& u);
void to_json(nlohmann::json& j, const DialogueSeed& s);
void from_json(const nlohmann::json& j, DialogueSeed& s);
void to_json(nlohmann::json& j, const Dialogue& d);
void from_json(const nlohmann::json& j, Dialogue& d);
void to_json(nlohmann::json& j, const ScriptedBotSpec& s);
void from_json(const nlohmann::json& j, ScriptedBotSpec& s);
void to_json(nlohmann::json& j, const SystemRef& s);
void from_json(const nlohmann::json& j, SystemRef& s);

}  // namespace dialeval
