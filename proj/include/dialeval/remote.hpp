#pragma once

#include <chrono>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/bot.hpp"
#include "dialeval/core.hpp"

namespace dialeval {

// Wire encoding shared by the bot and scoring protocols. "A" is the Target.
namespace wire {

std::string_view speaker_label(Role role);
nlohmann::json respond_request(std::string_view dialogue_id, Role respond_as, std::span<const Utterance> history);
nlohmann::json score_request(std::span<const std::string> context, std::string_view candidate);

// Schema checks; each returns a list of violations, empty when conformant.
std::vector<std::string> check_respond_response(const nlohmann::json& body);
std::vector<std::string> check_score_response(const nlohmann::json& body);
std::vector<std::string> check_health_response(const nlohmann::json& body);

}  // namespace wire

// Minimal JSON-over-HTTP client. Transport failures and 5xx answers throw
// RetryableError; other non-200 answers and unparsable bodies throw
// ProtocolError.
class JsonHttpClient {
 public:
  JsonHttpClient(const std::string& endpoint, std::chrono::milliseconds timeout);

  nlohmann::json get(const std::string& path) const;
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

  const Endpoint& endpoint() const { return endpoint_; }

 private:
  Endpoint endpoint_;
  std::chrono::milliseconds timeout_;
};

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::string endpoint;
  std::vector<ConformanceCheck> checks;

  bool ok() const;
  std::vector<std::string> violations() const;
  std::string render() const;
};

// Replays the golden fixtures against /v1/health, /v1/respond and /v1/score.
ConformanceReport validate_backend(const std::string& endpoint,
                                   std::chrono::milliseconds timeout = std::chrono::milliseconds{30000});

// The request fixtures replayed by validate_backend.
const nlohmann::json& golden_fixtures();

}  // namespace dialeval
