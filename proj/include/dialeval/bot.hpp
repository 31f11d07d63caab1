#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dialeval/core.hpp"
#include "dialeval/rng.hpp"

namespace dialeval {

struct BotRequest {
  std::string_view dialogue_id;
  Role respond_as = Role::Target;
  std::span<const Utterance> history;
};

struct HealthStatus {
  bool ok = false;
  std::string model;
};

// A dialogue system as the engine sees it. Implementations are stateless
// between calls and safe to call from many threads at once.
class Bot {
 public:
  virtual ~Bot() = default;
  // Non-empty reply to history. Throws RetryableError / ProtocolError.
  virtual std::string respond(const BotRequest& request, RngStream stream) const = 0;
  virtual HealthStatus health() const = 0;
};

struct BotHandle {
  std::string system_id;
  std::shared_ptr<const Bot> bot;
};

using BotRegistry = std::map<std::string, BotHandle, std::less<>>;

struct RemoteOptions {
  std::chrono::milliseconds timeout{30000};
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
};

std::shared_ptr<const Bot> make_scripted_bot(const ScriptedBotSpec& spec);
std::shared_ptr<const Bot> make_remote_bot(const std::string& endpoint, const RemoteOptions& options);
std::shared_ptr<const Bot> make_bot(const SystemRef& system, const RemoteOptions& options);

// One handle per system id; throws ConfigError on duplicates.
BotRegistry make_registry(std::span<const SystemRef> systems, const RemoteOptions& options = {});

// Enforces the non-empty history precondition and the non-empty reply contract.
std::string respond(const BotHandle& handle, const BotRequest& request, RngStream stream);
HealthStatus health_check(const BotHandle& handle);

// Vocabulary model behind the QualityBot population.
namespace synthetic {

// Filler words every QualityBot falls back on; low quality means more of these.
std::span<const std::string> generic_words();
bool is_generic(std::string_view token);

// 64 pseudo-words, a pure function of the seed; distinct seeds give
// effectively disjoint vocabularies.
std::vector<std::string> vocabulary(std::uint64_t vocabulary_seed);

// Fraction of tokens that are not generic filler. QualityBot output has
// expected density equal to its quality parameter.
double specificity_density(std::string_view text);

// Tokens shared by two adjacent utterances over tokens in the second.
double adjacent_overlap(std::string_view previous, std::string_view current);

inline constexpr std::size_t kUtteranceTokens = 8;
inline constexpr std::size_t kCopyLength = 4;

}  // namespace synthetic

}  // namespace dialeval
