#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "dialeval/rng.hpp"

namespace dialeval::testing {

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("dialeval-test-" + std::to_string(splitmix64(static_cast<std::uint64_t>(stamp) + counter++)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace dialeval::testing
