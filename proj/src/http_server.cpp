#include "idrl/http_server.hpp"

#include <cstdlib>

#include <httplib.h>

#include "idrl/error.hpp"

namespace idrl {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class Fn>
void guarded(httplib::Response& res, int ok_status, Fn&& fn) {
  try {
    send_json(res, ok_status, fn());
  } catch (const Error& e) {
    send_json(res, http_status(e.kind()), error_payload(e));
  } catch (const std::exception& e) {
    send_json(res, 500, Json{{"error", "internal"}, {"message", e.what()}});
  }
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::invalid_input, std::string("request body is not valid JSON: ") + e.what());
  }
}

}  // namespace

ServerOptions server_options_from_env(ServerOptions base) {
  if (const char* v = std::getenv("IDRL_BIND_ADDRESS")) base.host = v;
  if (const char* v = std::getenv("IDRL_PORT")) {
    try {
      base.port = std::stoi(v);
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_configuration, "IDRL_PORT must be an integer", "IDRL_PORT");
    }
  }
  if (const char* v = std::getenv("IDRL_STATIC_DIR")) base.static_dir = v;
  if (const char* v = std::getenv("IDRL_SNAPSHOT_DIR")) base.snapshot_dir = v;
  return base;
}

struct HttpServer::Impl {
  Impl(SessionManager& s, ServerOptions o) : sessions(s), options(std::move(o)) {}
  SessionManager& sessions;
  ServerOptions options;
  httplib::Server server;
};

HttpServer::HttpServer(SessionManager& sessions, ServerOptions options)
    : impl_(std::make_unique<Impl>(sessions, std::move(options))) {
  auto& srv = impl_->server;
  SessionManager& sm = impl_->sessions;

  srv.Post("/sessions", [&sm](const httplib::Request& req, httplib::Response& res) {
    guarded(res, 201, [&] { return sm.create(parse_body(req)); });
  });
  srv.Get(R"(/sessions/([^/]+)/next-query)", [&sm](const httplib::Request& req, httplib::Response& res) {
    guarded(res, 200, [&] { return sm.next_query(req.matches[1]); });
  });
  srv.Post(R"(/sessions/([^/]+)/answer)", [&sm](const httplib::Request& req, httplib::Response& res) {
    guarded(res, 200, [&] { return sm.submit_answer(req.matches[1], parse_body(req)); });
  });
  srv.Get(R"(/sessions/([^/]+)/progress)", [&sm](const httplib::Request& req, httplib::Response& res) {
    guarded(res, 200, [&] { return sm.progress(req.matches[1]); });
  });
  srv.Get(R"(/sessions/([^/]+)/env)", [&sm](const httplib::Request& req, httplib::Response& res) {
    guarded(res, 200, [&] { return sm.env(req.matches[1]); });
  });
  if (impl_->options.static_dir && !srv.set_mount_point("/", *impl_->options.static_dir))
    fail(ErrorKind::invalid_configuration, "static directory '" + *impl_->options.static_dir + "' does not exist",
         "static_dir");
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) return impl_->server.bind_to_any_port(o.host);
  return impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace idrl
