/* SPDX-License-Identifier: Apache-2.0 */

/** Session service: WebSocket endpoint `/session` plus static files at `/`. */

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

namespace dial {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  std::filesystem::path web_root = "hunt_ui/dist";
  double auto_tick_hz = 10.0;
  int threads = 1;
};

/// Parses "host:port" (as in DIAL_BIND); returns false on a malformed value.
bool parse_bind_address(const std::string& text, ServerOptions& options);

class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Port actually bound.
  std::uint16_t port() const;

  /// Blocks until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dial
