#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace dialeval {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Named, hash-derived random substream. Everything random in a run hangs
// off one master seed through derive(), so results never depend on which
// thread or in which order work happened.
class RngStream {
 public:
  explicit constexpr RngStream(std::uint64_t key) : key_(key) {}

  RngStream derive(std::string_view label) const;
  RngStream derive(std::uint64_t n) const;

  std::uint64_t key() const { return key_; }
  std::mt19937_64 engine() const { return std::mt19937_64{splitmix64(key_)}; }

  bool operator==(const RngStream&) const = default;

 private:
  std::uint64_t key_;
};

RngStream task_stream(std::uint64_t master_seed, std::string_view target, std::string_view partner,
                      std::size_t replicate);

// Portable draws: the standard distributions are implementation-defined, so
// runs would differ between standard libraries.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return static_cast<std::size_t>(x % bound);
}

inline double standard_normal(std::mt19937_64& gen) {
  double u1 = uniform01(gen);
  while (u1 <= 0.0) u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

template <typename T>
void portable_shuffle(std::span<T> items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(gen, i)]);
  }
}

}  // namespace dialeval
