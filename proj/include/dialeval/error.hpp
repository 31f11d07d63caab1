#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dialeval {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; line is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : Error(file + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Transport failures and timeouts; safe to retry.
class RetryableError : public Error {
 public:
  using Error::Error;
};

// Peer answered but broke the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A FED variant has no candidates for the requested dimension.
class UndefinedScoreError : public Error {
 public:
  using Error::Error;
};

}  // namespace dialeval
