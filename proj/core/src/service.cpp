#include "littag/service.hpp"

#include <algorithm>
#include <charconv>
#include <optional>

#include "littag/json.hpp"
#include "littag/query.hpp"
#include "littag/reconcile.hpp"
#include "littag/report.hpp"
#include "littag/tagging.hpp"
#include "littag/text.hpp"
#include "littag/workbook.hpp"

namespace littag {

using json::Json;

std::string url_decode(std::string_view text) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      int hi = hex(text[i + 1]);
      int lo = hex(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

namespace {

struct Snapshot {
  DatabaseMeta meta;
  TagDatabase db;
};

struct Entry {
  std::timed_mutex writer;
  mutable std::mutex pointer_mu;
  std::shared_ptr<const Snapshot> current;

  std::shared_ptr<const Snapshot> get() const {
    std::lock_guard lock(pointer_mu);
    return current;
  }
  void set(std::shared_ptr<const Snapshot> next) {
    std::lock_guard lock(pointer_mu);
    current = std::move(next);
  }
};

// Outcome of a mutation callback.
struct Mutation {
  TagDatabase db;
  Json body = Json::object();
  std::vector<Workspace::Sidecar> sidecars;
};

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDatabase:
    case ErrorCode::UnknownKey:
    case ErrorCode::UnknownVersion: return 404;
    case ErrorCode::WriterConflict:
    case ErrorCode::DatabaseExists: return 409;
    case ErrorCode::StorageError: return 500;
    default: return 400;
  }
}

Response json_response(int status, const Json& body) { return {status, "application/json", json::dump(body)}; }

Response error_response(int status, std::string_view name, std::string_view detail) {
  Json body;
  body["error"] = name;
  body["detail"] = detail;
  return json_response(status, body);
}

[[noreturn]] void bad_request(std::string detail) { throw Error(ErrorCode::InvalidRequest, std::move(detail)); }

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) out.push_back(url_decode(path.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

std::optional<std::string> query_value(const Request& req, const std::string& name) {
  auto it = req.query.find(name);
  if (it == req.query.end()) return std::nullopt;
  return it->second;
}

std::string required_query(const Request& req, const std::string& name) {
  auto v = query_value(req, name);
  if (!v || v->empty()) bad_request("missing query parameter '" + name + "'");
  return *v;
}

std::size_t size_param(const Request& req, const std::string& name, std::size_t fallback) {
  auto v = query_value(req, name);
  if (!v || v->empty()) return fallback;
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) bad_request(name + " must be a non-negative integer");
  return out;
}

std::optional<FilterExpr> filter_param(const Request& req) {
  auto v = query_value(req, "filter");
  if (!v || text::trim(*v).empty()) return std::nullopt;
  return parse_filter(*v);
}

Json parse_body_object(const Request& req) {
  Json body;
  try {
    body = Json::parse(req.body);
  } catch (const Json::exception& e) {
    bad_request(std::string("request body is not JSON: ") + e.what());
  }
  if (!body.is_object()) bad_request("request body must be a JSON object");
  return body;
}

std::string string_field(const Json& body, const char* name) {
  if (!body.contains(name) || !body[name].is_string()) bad_request(std::string("'") + name + "' must be a string");
  return body[name].get<std::string>();
}

const UploadPart* find_part(const Request& req, std::string_view name) {
  for (const auto& part : req.parts) {
    if (part.name == name) return &part;
  }
  return nullptr;
}

ZoteroExport export_upload(const Request& req) {
  if (!req.parts.empty()) {
    const auto* part = find_part(req, "export");
    if (!part) bad_request("missing 'export' upload");
    return parse_zotero_export(part->content);
  }
  if (req.body.empty()) bad_request("missing export CSV body");
  return parse_zotero_export(req.body);
}

std::string file_stem(std::string_view filename) {
  auto slash = filename.find_last_of("/\\");
  if (slash != std::string_view::npos) filename.remove_prefix(slash + 1);
  auto dot = filename.rfind('.');
  if (dot != std::string_view::npos && dot > 0) filename = filename.substr(0, dot);
  return std::string(filename);
}

CategoriesSchema categories_upload(const Request& req) {
  std::vector<const UploadPart*> parts;
  for (const auto& part : req.parts) {
    if (part.name == "categories") parts.push_back(&part);
  }
  if (parts.empty()) {
    if (workbook::looks_like_zip(req.body)) return parse_categories_workbook(req.body);
    bad_request("missing 'categories' upload (one .xlsx or one <Group>.csv per group)");
  }
  if (parts.size() == 1 && workbook::looks_like_zip(parts.front()->content)) {
    return parse_categories_workbook(parts.front()->content);
  }
  std::sort(parts.begin(), parts.end(), [](const auto* a, const auto* b) { return a->filename < b->filename; });
  std::vector<GroupTable> tables;
  for (const auto* part : parts) {
    if (part->filename.empty()) bad_request("categories uploads need a <Group>.csv filename");
    tables.push_back({file_stem(part->filename), part->content});
  }
  return parse_categories_tables(tables);
}

Json meta_json(const Snapshot& s) {
  Json out;
  out["name"] = s.meta.name;
  out["latest"] = s.meta.latest;
  out["versions"] = s.meta.versions.size();
  out["rows"] = s.db.size();
  out["fingerprint"] = s.meta.fingerprint;
  out["columns"] = s.db.header();
  return out;
}

}  // namespace

struct Service::Impl {
  Workspace& ws;
  ServiceOptions options;
  std::mutex entries_mu;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> entries;

  Impl(Workspace& w, ServiceOptions o) : ws(w), options(o) {}

  std::shared_ptr<Entry> entry(std::string_view name) {
    std::lock_guard lock(entries_mu);
    auto it = entries.find(name);
    if (it != entries.end()) return it->second;
    auto meta = ws.meta(name);  // throws UnknownDatabase
    auto e = std::make_shared<Entry>();
    auto db = ws.load(meta);
    e->current = std::make_shared<const Snapshot>(Snapshot{std::move(meta), std::move(db)});
    entries.emplace(std::string(name), e);
    return e;
  }

  std::shared_ptr<const Snapshot> snapshot(std::string_view name) { return entry(name)->get(); }

  template <class F>
  Response mutate(std::string_view name, F&& apply) {
    auto e = entry(name);
    std::unique_lock lock(e->writer, std::defer_lock);
    if (!lock.try_lock_for(options.writer_wait)) {
      throw Error(ErrorCode::WriterConflict, std::string(name) + " is being modified; retry");
    }
    auto current = e->get();
    Mutation m = apply(*current);
    Json body;
    body["database"] = current->meta.name;
    if (m.db == current->db && m.sidecars.empty()) {
      body["version"] = current->meta.latest;
      body["changed"] = false;
    } else {
      auto result = ws.commit(current->meta, m.db, m.sidecars);
      auto next = std::make_shared<const Snapshot>(Snapshot{result.meta, std::move(m.db)});
      body["version"] = next->meta.latest;
      body["changed"] = true;
      if (!result.sidecars.empty()) body["sidecars"] = result.sidecars;
      e->set(std::move(next));
    }
    for (auto& [k, v] : m.body.items()) body[k] = v;
    return json_response(200, body);
  }

  Response create(std::string name, const TagDatabase& db, Json extra, int status) {
    std::shared_ptr<Entry> e = std::make_shared<Entry>();
    {
      std::lock_guard lock(entries_mu);
      if (entries.count(name) || ws.exists(name)) throw Error(ErrorCode::DatabaseExists, name);
      auto meta = ws.create(name, db);
      e->current = std::make_shared<const Snapshot>(Snapshot{std::move(meta), db});
      entries.emplace(name, e);
    }
    Json body = meta_json(*e->get());
    for (auto& [k, v] : extra.items()) body[k] = v;
    return json_response(status, body);
  }

  // --- routes --------------------------------------------------------------

  Response list_databases() {
    Json list = Json::array();
    for (const auto& name : ws.names()) list.push_back(meta_json(*snapshot(name)));
    Json body;
    body["databases"] = std::move(list);
    return json_response(200, body);
  }

  Response create_database_route(const Request& req) {
    std::string name;
    if (const auto* part = find_part(req, "name")) name = part->content;
    if (name.empty()) name = query_value(req, "name").value_or("");
    if (name.empty()) bad_request("missing database name");
    check_base_name(name);
    auto exp = export_upload(req);
    auto schema = categories_upload(req);
    return create(name, littag::create_database(exp, schema), Json::object(), 201);
  }

  Response get_database(std::string_view name) {
    auto s = snapshot(name);
    Json body = meta_json(*s);
    body["schema"] = json::schema(s->db.schema());
    return json_response(200, body);
  }

  Response list_rows(std::string_view name, const Request& req) {
    auto s = snapshot(name);
    auto filter = filter_param(req);
    std::vector<std::size_t> rows;
    if (filter) {
      rows = filter_rows(s->db, *filter);
    } else {
      rows.resize(s->db.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    }
    auto offset = size_param(req, "offset", 0);
    auto limit = size_param(req, "limit", options.default_page_size);
    std::vector<std::size_t> page;
    for (std::size_t i = offset; i < rows.size() && page.size() < limit; ++i) page.push_back(rows[i]);
    Json body;
    body["total"] = rows.size();
    body["offset"] = offset;
    body["limit"] = limit;
    body["rows"] = json::rows(s->db, page);
    return json_response(200, body);
  }

  Response get_row(std::string_view name, std::string_view key) {
    auto s = snapshot(name);
    const auto* row = s->db.find(key);
    if (!row) throw Error(ErrorCode::UnknownKey, std::string(key));
    return json_response(200, json::row(s->db, *row));
  }

  Response patch_tags(std::string_view name, const std::string& key, const Request& req) {
    auto body = parse_body_object(req);
    for (const auto& [tag, value] : body.items()) {
      if (!value.is_string()) bad_request("value of '" + tag + "' must be a string (\"\" clears)");
    }
    return mutate(name, [&](const Snapshot& s) {
      if (!s.db.contains(key)) throw Error(ErrorCode::UnknownKey, key);
      TagDatabase db = s.db;
      for (const auto& [tag, value] : body.items()) db = assign_text(db, key, tag, value.get<std::string>());
      Mutation m{std::move(db), Json::object(), {}};
      m.body["row"] = json::row(m.db, *m.db.find(key));
      return m;
    });
  }

  Response sync_route(std::string_view name, const Request& req) {
    auto exp = export_upload(req);
    return mutate(name, [&](const Snapshot& s) {
      auto result = sync(s.db, exp);
      Mutation m{std::move(result.db), Json::object(), {}};
      if (!result.report.removed.empty()) {
        m.sidecars.push_back({"removed", serialize_database(archive_of(s.db, result.report.removed))});
      }
      m.body["report"] = json::sync_report(result.report);
      return m;
    });
  }

  Response conform_route(std::string_view name, const Request& req) {
    auto schema = categories_upload(req);
    auto policy_text = query_value(req, "policy").value_or("quarantine");
    InvalidCellPolicy policy;
    if (text::iequals(policy_text, "quarantine")) {
      policy = InvalidCellPolicy::Quarantine;
    } else if (text::iequals(policy_text, "strict")) {
      policy = InvalidCellPolicy::Strict;
    } else {
      bad_request("policy must be quarantine or strict");
    }
    return mutate(name, [&](const Snapshot& s) {
      auto result = conform(s.db, schema, policy);
      Mutation m{std::move(result.db), Json::object(), {}};
      m.body["report"] = json::conform_report(result.report);
      return m;
    });
  }

  Response replace_option_route(std::string_view name, const Request& req) {
    auto body = parse_body_object(req);
    auto tag = string_field(body, "tag");
    auto old_option = string_field(body, "old");
    auto new_option = string_field(body, "new");
    return mutate(name, [&](const Snapshot& s) {
      auto result = replace_option(s.db, tag, old_option, new_option);
      Mutation m{std::move(result.db), Json::object(), {}};
      m.body["result"] = json::replace_result(result);
      return m;
    });
  }

  Response relink_route(std::string_view name, const Request& req) {
    auto exp = export_upload(req);
    return mutate(name, [&](const Snapshot& s) {
      auto result = relink(s.db, exp);
      Mutation m{std::move(result.db), Json::object(), {}};
      m.body["report"] = json::relink_report(result.report);
      return m;
    });
  }

  Response merge_route(const Request& req) {
    auto body = parse_body_object(req);
    if (!body.contains("names") || !body["names"].is_array()) bad_request("'names' must be a list of database names");
    std::vector<TagDatabase> dbs;
    for (const auto& n : body["names"]) {
      if (!n.is_string()) bad_request("'names' must be a list of database names");
      dbs.push_back(snapshot(n.get<std::string>())->db);
    }
    auto policy = MergePolicy::Error;
    if (body.contains("policy")) policy = parse_merge_policy(string_field(body, "policy"));
    auto target = string_field(body, "name");
    check_base_name(target);
    auto result = merge(dbs, policy);
    Json extra;
    extra["report"] = json::merge_report(result.report);
    return create(target, result.db, extra, 201);
  }

  Response counts(std::string_view name, const Request& req) {
    auto s = snapshot(name);
    std::optional<std::vector<std::string>> keys;
    if (auto filter = filter_param(req)) keys = eval_filter(s->db, *filter);
    return json_response(200, json::option_counts(option_counts(s->db, keys)));
  }

  Response crosstab_route(std::string_view name, const Request& req) {
    auto s = snapshot(name);
    auto rows = required_query(req, "rows");
    auto cols = required_query(req, "cols");
    return json_response(200, json::crosstab(crosstab(s->db, rows, cols, filter_param(req))));
  }

  Response diff_route(std::string_view name, const Request& req) {
    auto s = snapshot(name);
    auto against = required_query(req, "against");
    auto old_table = parse_keyed_table(ws.read_version(s->meta, against));
    return json_response(200, json::diff_report(diff(old_table, to_keyed_table(s->db))));
  }

  Response table(std::string_view name, const Request& req) {
    auto s = snapshot(name);
    std::vector<std::string> columns;
    auto [lo, hi] = req.query.equal_range("columns");
    for (auto it = lo; it != hi; ++it) {
      for (const auto& c : text::split(it->second, ',')) {
        if (!c.empty()) columns.push_back(c);
      }
    }
    return {200, "text/csv; charset=utf-8", export_table(s->db, columns, filter_param(req))};
  }

  Response report(std::string_view name, const Request& req) {
    auto s = snapshot(name);
    auto spec_text = query_value(req, "spec").value_or("{}");
    auto spec = parse_report_spec(spec_text.empty() ? "{}" : spec_text);
    return {200, "text/html; charset=utf-8", build_report(s->db, spec, ws.now())};
  }

  Response versions(std::string_view name) {
    auto s = snapshot(name);
    Json list = Json::array();
    for (auto it = s->meta.versions.rbegin(); it != s->meta.versions.rend(); ++it) list.push_back(*it);
    Json body;
    body["versions"] = std::move(list);
    return json_response(200, body);
  }

  Response route(const Request& req) {
    auto seg = split_path(req.path);
    const auto& m = req.method;
    auto not_allowed = [&] { return error_response(405, "MethodNotAllowed", m + " " + req.path); };
    if (seg.empty() || seg[0] != "api") return error_response(404, "NotFound", req.path);
    seg.erase(seg.begin());

    if (seg.size() == 1 && seg[0] == "merge") return m == "POST" ? merge_route(req) : not_allowed();
    if (seg.empty() || seg[0] != "databases") return error_response(404, "NotFound", req.path);
    if (seg.size() == 1) {
      if (m == "GET") return list_databases();
      if (m == "POST") return create_database_route(req);
      return not_allowed();
    }
    const auto& name = seg[1];
    if (seg.size() == 2) return m == "GET" ? get_database(name) : not_allowed();

    const auto& action = seg[2];
    if (action == "rows") {
      if (seg.size() == 3) return m == "GET" ? list_rows(name, req) : not_allowed();
      if (seg.size() == 4) return m == "GET" ? get_row(name, seg[3]) : not_allowed();
      if (seg.size() == 5 && seg[4] == "tags") return m == "PATCH" ? patch_tags(name, seg[3], req) : not_allowed();
      return error_response(404, "NotFound", req.path);
    }
    if (seg.size() != 3) return error_response(404, "NotFound", req.path);
    if (action == "sync") return m == "POST" ? sync_route(name, req) : not_allowed();
    if (action == "conform") return m == "POST" ? conform_route(name, req) : not_allowed();
    if (action == "replace-option") return m == "POST" ? replace_option_route(name, req) : not_allowed();
    if (action == "relink") return m == "POST" ? relink_route(name, req) : not_allowed();
    if (action == "counts") return m == "GET" ? counts(name, req) : not_allowed();
    if (action == "crosstab") return m == "GET" ? crosstab_route(name, req) : not_allowed();
    if (action == "diff") return m == "GET" ? diff_route(name, req) : not_allowed();
    if (action == "table") return m == "GET" ? table(name, req) : not_allowed();
    if (action == "report") return m == "GET" ? report(name, req) : not_allowed();
    if (action == "versions") return m == "GET" ? versions(name) : not_allowed();
    return error_response(404, "NotFound", req.path);
  }
};

Service::Service(Workspace& workspace, ServiceOptions options) : impl_(std::make_unique<Impl>(workspace, options)) {}

Service::~Service() = default;

Response Service::dispatch(const Request& request) {
  try {
    return impl_->route(request);
  } catch (const Error& e) {
    return json_response(status_for(e.code()), json::error_body(e));
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

}  // namespace littag
