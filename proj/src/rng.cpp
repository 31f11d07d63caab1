#include "dialeval/rng.hpp"

#include <string>

namespace dialeval {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream RngStream::derive(std::string_view label) const {
  // Length prefix keeps ("ab","c") and ("a","bc") apart when chained.
  const std::string prefix = std::to_string(label.size()) + ':';
  return RngStream{splitmix64(fnv1a64(label, fnv1a64(prefix, key_)))};
}

RngStream RngStream::derive(std::uint64_t n) const { return RngStream{splitmix64(key_ ^ splitmix64(n + 1))}; }

RngStream task_stream(std::uint64_t master_seed, std::string_view target, std::string_view partner,
                      std::size_t replicate) {
  return RngStream{master_seed}.derive("task").derive(target).derive(partner).derive(
      static_cast<std::uint64_t>(replicate));
}

}  // namespace dialeval
