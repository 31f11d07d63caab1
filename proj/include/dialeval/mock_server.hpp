#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "dialeval/core.hpp"
#include "dialeval/mock_backend.hpp"

namespace dialeval {

// In-process HTTP server speaking the bot and scoring protocols with a
// scripted bot and the mock likelihood model behind them. Faults let tests
// exercise client error handling and the conformance validator.
struct MockServerOptions {
  enum class Fault { None, ZeroTokenCount, OmitText, EmptyText, ServerError };

  ScriptedBotSpec bot{ScriptedKind::Template, 0.5, 0.0, 0};
  MockOverlapSpec scorer;
  std::string model = "mock-shim";
  Fault fault = Fault::None;
  int fail_first_requests = 0;  // answer HTTP 503 this many times first
};

class MockServer {
 public:
  explicit MockServer(MockServerOptions options = {});
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  // Binds 127.0.0.1 on `port` (0 = any free port) and serves on a thread.
  void start(int port = 0);
  // Blocks the calling thread.
  void listen(const std::string& host, int port);
  void stop();

  int port() const { return port_; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::size_t requests() const { return requests_.load(); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
  std::thread thread_;
};

}  // namespace dialeval
