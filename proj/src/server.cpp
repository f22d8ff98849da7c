/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "dial/error.hpp"
#include "dial/session.hpp"

namespace dial {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

constexpr std::string_view kPlaceholderPage =
    "<!doctype html><html><head><title>tag hunt</title></head><body>"
    "<p>The hunt UI is not built. Connect a WebSocket client to <code>/session</code>.</p>"
    "</body></html>";

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, SessionManager& sessions, double tick_hz)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        sessions_(sessions),
        tick_period_(tick_hz > 0 ? std::chrono::microseconds(
                                       static_cast<std::int64_t>(1e6 / tick_hz))
                                 : std::chrono::microseconds(0)),
        tick_dt_(tick_hz > 0 ? 1.0 / tick_hz : 0.0) {}

  void start(http::request<http::string_body> request) {
    ws_.async_accept(request, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->read();
      self->schedule_tick();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->timer_.cancel();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->on_message(text);
      self->read();
    });
  }

  void on_message(const std::string& text) {
    const auto msg = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (msg.is_discarded() || !msg.is_object()) {
      send(error_message(ErrorCode::BadRequest, "message is not a JSON object").dump());
      return;
    }
    const bool hello = msg.value("type", "") == "hello";
    if (hello && msg.contains("session") && msg["session"].is_string()) {
      const std::string wanted = msg["session"].get<std::string>();
      if (!sessions_.exists(wanted)) {
        auto err = error_message(ErrorCode::BadSession, "no session " + wanted);
        if (msg.contains("id")) err["id"] = msg["id"];
        send(err.dump());
        return;
      }
      session_id_ = wanted;
    } else if (session_id_.empty()) {
      if (!hello) {
        auto err = error_message(ErrorCode::BadSession, "send hello first");
        if (msg.contains("id")) err["id"] = msg["id"];
        send(err.dump());
        return;
      }
      session_id_ = sessions_.create();
    }
    deliver(sessions_.handle(session_id_, msg));
  }

  void deliver(const Reply& reply) {
    send(reply.response.dump());
    for (const auto& p : reply.pushes) send(p.dump());
  }

  void schedule_tick() {
    if (tick_period_.count() == 0 || closed_) return;
    timer_.expires_after(tick_period_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      if (!self->session_id_.empty()) {
        if (auto r = self->sessions_.auto_tick(self->session_id_, self->tick_dt_)) {
          self->deliver(*r);
        }
      }
      self->schedule_tick();
    });
  }

  void send(std::string text) {
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->closed_ = true;
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->write_next();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  SessionManager& sessions_;
  std::string session_id_;
  std::chrono::microseconds tick_period_;
  double tick_dt_;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, SessionManager& sessions, const ServerOptions& options)
      : stream_(std::move(socket)), sessions_(sessions), options_(options) {}

  void start() { read(); }

 private:
  void read() {
    request_ = {};
    http::async_read(stream_, buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->on_request();
                     });
  }

  void on_request() {
    if (websocket::is_upgrade(request_)) {
      if (request_.target() == "/session") {
        std::make_shared<WsSession>(stream_.release_socket(), sessions_, options_.auto_tick_hz)
            ->start(std::move(request_));
      }
      return;
    }
    respond(static_response());
  }

  http::response<http::string_body> static_response() const {
    http::response<http::string_body> res;
    res.version(request_.version());
    res.keep_alive(false);
    res.set(http::field::server, "dialsim");
    if (request_.method() != http::verb::get) {
      res.result(http::status::method_not_allowed);
      res.body() = "method not allowed";
      res.prepare_payload();
      return res;
    }
    std::string target(request_.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target == "/") target = "/index.html";
    if (target.find("..") != std::string::npos) {
      res.result(http::status::bad_request);
      res.body() = "bad path";
      res.prepare_payload();
      return res;
    }
    const auto path = options_.web_root / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::stringstream body;
      body << in.rdbuf();
      res.result(http::status::ok);
      res.set(http::field::content_type, std::string(mime_type(path)));
      res.body() = body.str();
    } else if (target == "/index.html") {
      res.result(http::status::ok);
      res.set(http::field::content_type, "text/html");
      res.body() = std::string(kPlaceholderPage);
    } else {
      res.result(http::status::not_found);
      res.body() = "not found";
    }
    res.prepare_payload();
    return res;
  }

  void respond(http::response<http::string_body> res) {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  SessionManager& sessions_;
  const ServerOptions& options_;
};

}  // namespace

bool parse_bind_address(const std::string& text, ServerOptions& options) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) return false;
  try {
    std::size_t used = 0;
    const int port = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1 || port < 0 || port > 65535) return false;
    options.address = text.substr(0, colon);
    options.port = static_cast<std::uint16_t>(port);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

struct Server::Impl {
  explicit Impl(ServerOptions opts)
      : options(std::move(opts)),
        acceptor(io, tcp::endpoint(asio::ip::make_address(options.address), options.port)) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(socket), sessions, options)->start();
      accept();
    });
  }

  ServerOptions options;
  asio::io_context io;
  tcp::acceptor acceptor;
  SessionManager sessions;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() = default;

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->accept();
  const int n = std::max(1, impl_->options.threads);
  std::vector<std::thread> extra;
  for (int i = 1; i < n; ++i) extra.emplace_back([this] { impl_->io.run(); });
  impl_->io.run();
  for (auto& t : extra) t.join();
}

void Server::stop() { impl_->io.stop(); }

}  // namespace dial
