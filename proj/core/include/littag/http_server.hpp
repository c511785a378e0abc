#pragma once

#include <memory>
#include <string>

#include "littag/service.hpp"

namespace littag {

struct HttpOptions {
  std::string bind = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  bool allow_remote = false;
  std::string static_dir;  // served at "/" when non-empty
};

bool is_loopback(const std::string& address);

/// HTTP front end for a Service. The socket work happens on a background
/// thread started by start(); run() blocks instead.
class HttpServer {
 public:
  // Throws InvalidRequest for a non-loopback bind without allow_remote.
  HttpServer(Service& service, HttpOptions options);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and starts serving in the background; returns the bound port.
  // Throws StorageError when the address cannot be bound.
  int start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace littag
