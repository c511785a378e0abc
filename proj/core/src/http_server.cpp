#include "littag/http_server.hpp"

#include <thread>

#define CPPHTTPLIB_LISTEN_BACKLOG 128
#include <httplib.h>

#include "littag/error.hpp"

namespace littag {

bool is_loopback(const std::string& address) {
  return address == "localhost" || address == "::1" || address.rfind("127.", 0) == 0;
}

struct HttpServer::Impl {
  Service& service;
  HttpOptions options;
  httplib::Server server;
  std::thread worker;

  Impl(Service& s, HttpOptions o) : service(s), options(std::move(o)) {
    server.new_task_queue = [] { return new httplib::ThreadPool(32); };
    auto handler = [this](const httplib::Request& in, httplib::Response& out) { handle(in, out); };
    server.Get(R"(/api(/.*)?)", handler);
    server.Post(R"(/api(/.*)?)", handler);
    server.Patch(R"(/api(/.*)?)", handler);
    server.Put(R"(/api(/.*)?)", handler);
    server.Delete(R"(/api(/.*)?)", handler);
    if (!options.static_dir.empty() && !server.set_mount_point("/", options.static_dir)) {
      throw Error(ErrorCode::StorageError, "static directory not found: " + options.static_dir);
    }
  }

  void handle(const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    // The raw target keeps percent-escapes so the service decodes each path
    // segment exactly once.
    req.path = in.target.substr(0, in.target.find('?'));
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    req.content_type = in.get_header_value("Content-Type");
    if (in.is_multipart_form_data()) {
      for (const auto& [name, file] : in.files) req.parts.push_back({name, file.filename, file.content});
    } else {
      req.body = in.body;
    }
    auto res = service.dispatch(req);
    out.status = res.status;
    out.set_content(res.body, res.content_type);
  }

  void bind() {
    if (options.port == 0) {
      int port = server.bind_to_any_port(options.bind);
      if (port < 0) throw Error(ErrorCode::StorageError, "cannot bind " + options.bind);
      options.port = port;
    } else if (!server.bind_to_port(options.bind, options.port)) {
      throw Error(ErrorCode::StorageError, "cannot bind " + options.bind + ":" + std::to_string(options.port));
    }
  }
};

HttpServer::HttpServer(Service& service, HttpOptions options) {
  if (!options.allow_remote && !is_loopback(options.bind)) {
    throw Error(ErrorCode::InvalidRequest, "binding " + options.bind + " needs --allow-remote");
  }
  impl_ = std::make_unique<Impl>(service, std::move(options));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
  impl_->bind();
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->options.port;
}

void HttpServer::run() {
  impl_->bind();
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace littag
