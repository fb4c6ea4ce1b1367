#pragma once

#include <memory>
#include <optional>
#include <string>

#include "idrl/service.hpp"

namespace idrl {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> static_dir;    ///< built UI bundle, served at /
  std::optional<std::string> snapshot_dir;
};

/// IDRL_BIND_ADDRESS, IDRL_PORT, IDRL_STATIC_DIR and IDRL_SNAPSHOT_DIR
/// override the defaults.
ServerOptions server_options_from_env(ServerOptions base = {});

/// HTTP front end of a SessionManager:
///   POST /sessions
///   GET  /sessions/{id}/next-query
///   POST /sessions/{id}/answer
///   GET  /sessions/{id}/progress
///   GET  /sessions/{id}/env
class HttpServer {
 public:
  HttpServer(SessionManager& sessions, ServerOptions options);
  ~HttpServer();

  /// Binds (port 0 picks a free port) and returns the bound port, or -1.
  int bind();
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace idrl
