#include "dialeval/mock_server.hpp"

#include <httplib.h>

#include "dialeval/bot.hpp"
#include "dialeval/error.hpp"
#include "dialeval/remote.hpp"

namespace dialeval {

struct MockServer::Impl {
  MockServerOptions options;
  std::shared_ptr<const Bot> bot;
  MockOverlapBackend scorer;
  httplib::Server server;
  std::atomic<int> failures_left;

  explicit Impl(MockServerOptions opts)
      : options(std::move(opts)),
        bot(make_scripted_bot(options.bot)),
        scorer(options.scorer),
        failures_left(options.fail_first_requests) {}
};

namespace {

using Fault = MockServerOptions::Fault;

void reply(httplib::Response& res, const nlohmann::json& body) { res.set_content(body.dump(), "application/json"); }

}  // namespace

MockServer::MockServer(MockServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  auto& srv = impl_->server;
  auto* impl = impl_.get();

  srv.set_pre_routing_handler([this, impl](const httplib::Request&, httplib::Response& res) {
    ++requests_;
    if (impl->failures_left.fetch_sub(1) > 0) {
      res.status = 503;
      return httplib::Server::HandlerResponse::Handled;
    }
    if (impl->options.fault == Fault::ServerError) {
      res.status = 500;
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  srv.Get("/v1/health", [impl](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"status", "ok"}, {"model", impl->options.model}});
  });

  srv.Post("/v1/respond", [impl](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto body = nlohmann::json::parse(req.body);
      std::vector<Utterance> history;
      for (const auto& turn : body.at("history")) {
        const Role role = turn.at("speaker").get<std::string>() == "A" ? Role::Target : Role::Partner;
        history.push_back({history.size(), role, "", turn.at("text").get<std::string>(), Origin::Generated});
      }
      if (history.empty()) throw Error("empty history");
      const auto dialogue_id = body.at("dialogue_id").get<std::string>();
      const Role as = body.at("respond_as").get<std::string>() == "A" ? Role::Target : Role::Partner;
      const RngStream stream = RngStream{fnv1a64(dialogue_id)}.derive(static_cast<std::uint64_t>(history.size()));
      const auto text = impl->bot->respond({dialogue_id, as, history}, stream);
      switch (impl->options.fault) {
        case Fault::OmitText: reply(res, {{"reply", text}}); break;
        case Fault::EmptyText: reply(res, {{"text", ""}}); break;
        default: reply(res, {{"text", text}});
      }
    } catch (const std::exception& e) {
      res.status = 400;
      reply(res, {{"error", e.what()}});
    }
  });

  srv.Post("/v1/score", [impl](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto body = nlohmann::json::parse(req.body);
      const auto context = body.at("context").get<std::vector<std::string>>();
      const auto l = impl->scorer.score(context, body.at("candidate").get<std::string>());
      const std::int64_t tokens = impl->options.fault == Fault::ZeroTokenCount ? 0 : l.token_count;
      reply(res, {{"total_log_likelihood", l.total_log_likelihood}, {"token_count", tokens}});
    } catch (const std::exception& e) {
      res.status = 400;
      reply(res, {{"error", e.what()}});
    }
  });
}

MockServer::~MockServer() { stop(); }

void MockServer::start(int port) {
  auto& srv = impl_->server;
  port_ = port == 0 ? srv.bind_to_any_port("127.0.0.1") : (srv.bind_to_port("127.0.0.1", port) ? port : -1);
  if (port_ <= 0) throw Error("mock server could not bind a port");
  thread_ = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
}

void MockServer::listen(const std::string& host, int port) {
  port_ = port;
  if (!impl_->server.listen(host, port)) throw Error("mock server could not listen on " + host + ":" + std::to_string(port));
}

void MockServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace dialeval
