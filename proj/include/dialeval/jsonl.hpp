#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dialeval {

// Calls fn(record, line_number) for every non-blank line. JSON syntax errors
// and exceptions thrown by fn are rethrown as ParseError naming the line.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const nlohmann::json&, std::size_t)>& fn);

template <typename T>
std::vector<T> read_jsonl_as(const std::filesystem::path& path) {
  std::vector<T> out;
  read_jsonl(path, [&](const nlohmann::json& j, std::size_t) { out.push_back(j.get<T>()); });
  return out;
}

// Writes via a temporary file and rename, so readers never see half a file.
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);

template <typename Range>
void write_jsonl(const std::filesystem::path& path, const Range& records) {
  std::string out;
  for (const auto& r : records) {
    out += nlohmann::json(r).dump();
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::string read_text(const std::filesystem::path& path);

}  // namespace dialeval
