#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dialeval/mock_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mock bot and scoring service for local runs"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string kind = "template";
  double quality = 0.5;
  double affinity = 0.0;
  std::uint64_t vocab = 0;
  std::string model = "mock-shim";
  app.add_option("--host", host);
  app.add_option("--port", port)->check(CLI::Range(0, 65535));
  app.add_option("--bot", kind, "echo, template or quality")->check(CLI::IsMember({"echo", "template", "quality"}));
  app.add_option("--quality", quality)->check(CLI::Range(0.0, 1.0));
  app.add_option("--repetition-affinity", affinity)->check(CLI::Range(0.0, 1.0));
  app.add_option("--vocabulary-seed", vocab);
  app.add_option("--model", model);
  CLI11_PARSE(app, argc, argv);

  dialeval::MockServerOptions options;
  options.bot = {dialeval::parse_scripted_kind(kind), quality, affinity, vocab};
  options.model = model;
  try {
    dialeval::MockServer server(options);
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    server.listen(host, port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
