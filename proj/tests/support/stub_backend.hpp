#pragma once

#include <atomic>
#include <string>

#include "dialeval/fed.hpp"
#include "dialeval/rng.hpp"

namespace dialeval::testing {

// Deterministic pseudo-likelihood: a hash of the joined context and the
// candidate, scaled into [-40, 0). Token count is the candidate's length.
class StubBackend final : public ScoringBackend {
 public:
  explicit StubBackend(std::optional<std::size_t> max_context = std::nullopt) : max_context_(max_context) {}

  Likelihood score(std::span<const std::string> context, std::string_view candidate) const override {
    ++calls;
    std::uint64_t h = fnv1a64(candidate);
    for (const auto& c : context) h = fnv1a64(c, h ^ 0x9e3779b97f4a7c15ULL);
    const double u = static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53;
    last_context_size = context.size();
    return {-40.0 * u - 0.001, static_cast<std::int64_t>(tokenize(candidate).size())};
  }
  std::string descriptor() const override { return "stub"; }
  std::optional<std::size_t> max_context_utterances() const override { return max_context_; }

  mutable std::atomic<std::size_t> calls{0};
  mutable std::atomic<std::size_t> last_context_size{0};

 private:
  std::optional<std::size_t> max_context_;
};

}  // namespace dialeval::testing
