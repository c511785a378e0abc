#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "littag/workspace.hpp"

namespace littag {

struct UploadPart {
  std::string name;      // form field name
  std::string filename;  // empty for plain fields
  std::string content;
};

// Transport-neutral request. `path` is already percent-decoded per segment
// by the transport; query values are decoded.
struct Request {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> query;
  std::string content_type;
  std::string body;
  std::vector<UploadPart> parts;  // multipart/form-data uploads
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ServiceOptions {
  // How long a mutation waits for the database's writer before 409.
  std::chrono::milliseconds writer_wait{5000};
  std::size_t default_page_size = 100;
};

/// Routes /api requests to the core operations over one workspace.
///
/// Each database has one writer at a time (a timed mutex); readers take the
/// current immutable snapshot and never wait for the writer. A mutation
/// becomes visible only after its commit reached disk, so a failed save
/// leaves the previous snapshot in place.
class Service {
 public:
  explicit Service(Workspace& workspace, ServiceOptions options = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response dispatch(const Request& request);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Percent-decoding helper shared with the HTTP adapter ("+" is left alone).
std::string url_decode(std::string_view text);

}  // namespace littag
