#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "littag/error.hpp"
#include "littag/http_server.hpp"
#include "littag/json.hpp"
#include "littag/query.hpp"
#include "littag/reconcile.hpp"
#include "littag/report.hpp"
#include "littag/service.hpp"
#include "littag/tagging.hpp"
#include "littag/text.hpp"
#include "littag/workspace.hpp"

namespace littag::cli {

namespace fs = std::filesystem;
using json::Json;

namespace {

// File-system failures; mapped to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

struct OutputBase {
  fs::path dir;
  std::string base;
};

OutputBase split_base(const std::string& out) {
  fs::path p(out);
  OutputBase b{p.parent_path(), p.filename().string()};
  check_base_name(b.base);
  return b;
}

// Base name of an input database: the part before the timestamp when the
// file follows the versioned pattern, else the stem.
OutputBase base_of_input(const std::string& db_path) {
  fs::path p(db_path);
  auto name = p.filename().string();
  if (auto parsed = parse_versioned_filename(name)) return {p.parent_path(), parsed->base};
  return {p.parent_path(), p.stem().string()};
}

// Timestamped sibling paths never overwrite an existing file; a clash moves
// the stamp forward by a second.
struct Stamp {
  UtcInstant at;
  fs::path path(const OutputBase& b, const std::string& suffix = "") const {
    return b.dir / versioned_filename(b.base + suffix, at);
  }
};

Stamp free_stamp(const OutputBase& b, UtcInstant now, const std::vector<std::string>& suffixes) {
  Stamp s{now};
  for (;;) {
    bool clash = false;
    for (const auto& suffix : suffixes) clash = clash || fs::exists(s.path(b, suffix));
    if (!clash) return s;
    s.at += std::chrono::seconds(1);
  }
}

CategoriesSchema read_categories(const std::string& path) {
  if (!fs::exists(path)) throw IoError("categories not found: " + path);
  return load_categories(path);
}

ZoteroExport read_export(const std::string& path) { return parse_zotero_export(read_file(path)); }

// Loads a database that must already match the categories file exactly.
TagDatabase read_database(const std::string& path, const CategoriesSchema& schema) {
  auto loaded = load_database(read_file(path), schema, InvalidCellPolicy::Strict);
  if (!loaded.report.tags_added.empty() || !loaded.report.tags_removed.empty()) {
    std::string detail = path + " does not match the categories (";
    if (!loaded.report.tags_added.empty()) detail += "missing: " + text::join(loaded.report.tags_added, ", ");
    if (!loaded.report.tags_removed.empty()) {
      std::vector<std::string> names;
      for (const auto& t : loaded.report.tags_removed) names.push_back(t.name);
      if (!loaded.report.tags_added.empty()) detail += "; ";
      detail += "extra: " + text::join(names, ", ");
    }
    throw Error(ErrorCode::ColumnSetMismatch, detail + "); run conform first");
  }
  return std::move(loaded.db);
}

std::optional<FilterExpr> optional_filter(const std::string& text) {
  if (text::trim(text).empty()) return std::nullopt;
  return parse_filter(text);
}

// --- option holders ----------------------------------------------------------

struct Common {
  std::string db;
  std::string categories;
  std::string out;
  bool json = false;
};

struct Printer {
  std::ostream& out;
  bool json;

  void result(const Json& value, const std::string& plain) const {
    if (json) {
      Json envelope;
      envelope["ok"] = true;
      envelope["result"] = value;
      out << json::dump(envelope);
    } else {
      out << plain;
    }
  }
};

std::string counts_text(const OptionCounts& counts) {
  std::string out;
  csv::append_row(out, {"tag", "label", "count"});
  for (const auto& t : counts.tags) {
    for (const auto& e : t.entries) csv::append_row(out, {t.tag, e.label, std::to_string(e.count)});
  }
  return out;
}

std::string crosstab_text(const CrossTab& tab) {
  std::string out;
  csv::Row header{tab.row_tag + " \\ " + tab.col_tag};
  header.insert(header.end(), tab.col_labels.begin(), tab.col_labels.end());
  csv::append_row(out, header);
  for (std::size_t r = 0; r < tab.row_labels.size(); ++r) {
    csv::Row line{tab.row_labels[r]};
    for (auto n : tab.counts[r]) line.push_back(std::to_string(n));
    csv::append_row(out, line);
  }
  return out;
}

std::string diff_text(const DiffReport& d) {
  std::ostringstream out;
  for (const auto& c : d.columns_only_in_a) out << "column only in a: " << c << "\n";
  for (const auto& c : d.columns_only_in_b) out << "column only in b: " << c << "\n";
  for (const auto& k : d.only_in_a) out << "- " << k << "\n";
  for (const auto& k : d.only_in_b) out << "+ " << k << "\n";
  for (const auto& c : d.changed) out << "~ " << c.key << " [" << c.column << "] '" << c.value_a << "' -> '" << c.value_b << "'\n";
  if (d.empty()) out << "no differences\n";
  return out.str();
}

}  // namespace

Environment environment_from_process() {
  Environment env;
  env.clock = utc_now;
  if (const char* fixed = std::getenv("LITTAG_FIXED_TIME")) {
    if (auto t = parse_compact_utc(fixed)) {
      env.clock = [t = *t] { return t; };
    }
  }
  if (const char* bind = std::getenv("LITTAG_BIND")) env.bind = bind;
  return env;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  CLI::App app{"Tag databases for literature reviews: build, tag, reconcile, query and report.", "littag"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Common c;
  std::string export_path, key, tag, value, old_option, new_option, rows, cols, filter, expr, spec_path;
  std::string a_path, b_path, policy = "error", cell_policy = "quarantine", categories_out, workspace, bind, static_dir;
  std::vector<std::string> columns, inputs;
  int port = 8080;
  bool allow_remote = false;

  auto add_db = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--db", c.db, "Database CSV")->required();
    sub->add_option("--categories", c.categories, "Categories directory, CSV or .xlsx")->required();
    if (with_out) sub->add_option("--out", c.out, "Output base (dir/base); defaults to the input's base");
    sub->add_flag("--json", c.json, "Print a JSON envelope");
  };

  auto* new_cmd = app.add_subcommand("new", "Create a database from an export and a categories file");
  new_cmd->add_option("--export", export_path, "Citation export CSV")->required();
  new_cmd->add_option("--categories", c.categories, "Categories directory, CSV or .xlsx")->required();
  new_cmd->add_option("--out", c.out, "Output base (dir/base)")->required();
  new_cmd->add_flag("--json", c.json, "Print a JSON envelope");

  auto* tag_cmd = app.add_subcommand("tag", "Edit one cell");
  tag_cmd->require_subcommand(1);
  auto* tag_set = tag_cmd->add_subcommand("set", "Assign a serialized value (\"a; b\" for multi)");
  auto* tag_clear = tag_cmd->add_subcommand("clear", "Empty a cell");
  auto* tag_toggle = tag_cmd->add_subcommand("toggle", "Flip one option of a multi-select cell");
  for (auto* sub : {tag_set, tag_clear, tag_toggle}) {
    add_db(sub, true);
    sub->add_option("--key", key, "Citation key")->required();
    sub->add_option("--tag", tag, "Tag name")->required();
  }
  tag_set->add_option("--value", value, "New value; empty clears")->required();
  tag_toggle->add_option("--value", value, "Option to toggle")->required();

  auto* sync_cmd = app.add_subcommand("sync", "Align the database with a fresh export");
  add_db(sync_cmd, true);
  sync_cmd->add_option("--export", export_path, "Citation export CSV")->required();

  auto* relink_cmd = app.add_subcommand("relink", "Re-key rows against another library's export");
  add_db(relink_cmd, true);
  relink_cmd->add_option("--export", export_path, "Citation export CSV")->required();

  auto* diff_cmd = app.add_subcommand("diff", "Compare two database files");
  diff_cmd->add_option("--a", a_path, "First database CSV")->required();
  diff_cmd->add_option("--b", b_path, "Second database CSV")->required();
  diff_cmd->add_option("--categories", c.categories, "Validate both files against these categories");
  diff_cmd->add_flag("--json", c.json, "Print a JSON envelope");

  auto* merge_cmd = app.add_subcommand("merge", "Union databases tagged separately");
  merge_cmd->add_option("--out", c.out, "Output base (dir/base)")->required();
  merge_cmd->add_option("--policy", policy, "error | first-wins | last-wins");
  merge_cmd->add_option("--categories", c.categories, "Validate inputs against these categories");
  merge_cmd->add_option("inputs", inputs, "Database CSVs")->required()->expected(2, -1);
  merge_cmd->add_flag("--json", c.json, "Print a JSON envelope");

  auto* conform_cmd = app.add_subcommand("conform", "Re-shape a database to edited categories");
  add_db(conform_cmd, true);
  conform_cmd->add_option("--policy", cell_policy, "quarantine | strict");

  auto* replace_cmd = app.add_subcommand("replace-option", "Rename or merge an option everywhere");
  add_db(replace_cmd, true);
  replace_cmd->add_option("--tag", tag, "Tag name")->required();
  replace_cmd->add_option("--old", old_option, "Existing option")->required();
  replace_cmd->add_option("--new", new_option, "Replacement option")->required();
  replace_cmd->add_option("--categories-out", categories_out, "Write the updated categories to this directory");

  auto* counts_cmd = app.add_subcommand("counts", "Papers per option for every tag");
  add_db(counts_cmd, false);
  counts_cmd->add_option("--filter", filter, "Filter expression");

  auto* crosstab_cmd = app.add_subcommand("crosstab", "Papers per option pair of two tags");
  add_db(crosstab_cmd, false);
  crosstab_cmd->add_option("--rows", rows, "Row tag")->required();
  crosstab_cmd->add_option("--cols", cols, "Column tag")->required();
  crosstab_cmd->add_option("--filter", filter, "Filter expression");

  auto* filter_cmd = app.add_subcommand("filter", "Select papers; prints keys or a CSV table");
  add_db(filter_cmd, false);
  filter_cmd->add_option("--expr,--filter", expr, "Filter expression")->required();
  filter_cmd->add_option("--columns", columns, "Columns for a CSV table (Key is always first)")->delimiter(',');

  auto* report_cmd = app.add_subcommand("report", "Write an HTML report");
  add_db(report_cmd, false);
  report_cmd->add_option("--spec", spec_path, "Report spec: JSON file or inline JSON")->required();
  report_cmd->add_option("--out", c.out, "HTML output path")->required();

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service over a workspace directory");
  serve_cmd->add_option("--workspace", workspace, "Workspace directory")->required();
  serve_cmd->add_option("--port", port, "TCP port");
  serve_cmd->add_option("--bind", bind, "Bind address (default 127.0.0.1, or LITTAG_BIND)");
  serve_cmd->add_flag("--allow-remote", allow_remote, "Permit a non-loopback bind");
  serve_cmd->add_option("--static", static_dir, "Directory of UI assets served at /");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    app.exit(e, err, err);
    return kValidation;
  }

  Printer print{out, c.json};
  auto now = env.clock ? env.clock() : utc_now();
  auto default_out = [&]() { return c.out.empty() ? base_of_input(c.db) : split_base(c.out); };

  try {
    if (new_cmd->parsed()) {
      auto base = split_base(c.out);
      auto db = create_database(read_export(export_path), read_categories(c.categories));
      auto stamp = free_stamp(base, now, {""});
      auto path = stamp.path(base);
      write_file(path, save_database(db, base.base, stamp.at).bytes);
      print.result(Json{{"file", path.string()}, {"rows", db.size()}}, path.string() + "\n");
      return kOk;
    }

    if (tag_cmd->parsed()) {
      auto schema = read_categories(c.categories);
      auto db = read_database(c.db, schema);
      if (tag_set->parsed()) {
        db = assign_text(db, key, tag, value);
      } else if (tag_clear->parsed()) {
        db = clear(db, key, tag);
      } else {
        db = toggle_option(db, key, tag, value);
      }
      auto base = default_out();
      auto stamp = free_stamp(base, now, {""});
      auto path = stamp.path(base);
      write_file(path, save_database(db, base.base, stamp.at).bytes);
      print.result(Json{{"file", path.string()}, {"row", json::row(db, *db.find(key))}}, path.string() + "\n");
      return kOk;
    }

    if (sync_cmd->parsed()) {
      auto schema = read_categories(c.categories);
      auto db = read_database(c.db, schema);
      auto result = sync(db, read_export(export_path));
      auto base = default_out();
      auto stamp = free_stamp(base, now, {"", "_removed"});
      auto path = stamp.path(base);
      write_file(path, save_database(result.db, base.base, stamp.at).bytes);
      Json body{{"file", path.string()}, {"removed_file", nullptr}, {"report", json::sync_report(result.report)}};
      std::string plain = path.string() + "\n";
      if (!result.report.removed.empty()) {
        auto archive = stamp.path(base, "_removed");
        write_file(archive, serialize_database(archive_of(db, result.report.removed)));
        body["removed_file"] = archive.string();
        plain += archive.string() + "\n";
      }
      print.result(body, plain);
      return kOk;
    }

    if (relink_cmd->parsed()) {
      auto schema = read_categories(c.categories);
      auto result = relink(read_database(c.db, schema), read_export(export_path));
      auto base = default_out();
      auto stamp = free_stamp(base, now, {""});
      auto path = stamp.path(base);
      write_file(path, save_database(result.db, base.base, stamp.at).bytes);
      print.result(Json{{"file", path.string()}, {"report", json::relink_report(result.report)}}, path.string() + "\n");
      return kOk;
    }

    if (diff_cmd->parsed()) {
      DiffReport d;
      if (c.categories.empty()) {
        d = diff(parse_keyed_table(read_file(a_path)), parse_keyed_table(read_file(b_path)));
      } else {
        auto schema = read_categories(c.categories);
        d = diff(read_database(a_path, schema), read_database(b_path, schema));
      }
      print.result(json::diff_report(d), diff_text(d));
      return kOk;
    }

    if (merge_cmd->parsed()) {
      auto merge_policy = parse_merge_policy(policy);
      auto base = split_base(c.out);
      auto stamp = free_stamp(base, now, {""});
      auto path = stamp.path(base);
      MergeReport report;
      if (c.categories.empty()) {
        std::vector<KeyedTable> tables;
        for (const auto& in : inputs) tables.push_back(parse_keyed_table(read_file(in)));
        auto result = merge(tables, merge_policy);
        write_file(path, serialize_keyed_table(result.table));
        report = result.report;
      } else {
        auto schema = read_categories(c.categories);
        std::vector<TagDatabase> dbs;
        for (const auto& in : inputs) dbs.push_back(read_database(in, schema));
        auto result = merge(dbs, merge_policy);
        write_file(path, save_database(result.db, base.base, stamp.at).bytes);
        report = result.report;
      }
      print.result(Json{{"file", path.string()}, {"report", json::merge_report(report)}}, path.string() + "\n");
      return kOk;
    }

    if (conform_cmd->parsed()) {
      InvalidCellPolicy cells;
      if (text::iequals(cell_policy, "quarantine")) {
        cells = InvalidCellPolicy::Quarantine;
      } else if (text::iequals(cell_policy, "strict")) {
        cells = InvalidCellPolicy::Strict;
      } else {
        throw Error(ErrorCode::InvalidRequest, "--policy must be quarantine or strict");
      }
      auto schema = read_categories(c.categories);
      auto loaded = load_database(read_file(c.db), schema, cells);
      auto base = default_out();
      auto stamp = free_stamp(base, now, {"", "_quarantine"});
      auto path = stamp.path(base);
      write_file(path, save_database(loaded.db, base.base, stamp.at).bytes);
      Json body{{"file", path.string()}, {"quarantine_file", nullptr}, {"report", json::conform_report(loaded.report)}};
      std::string plain = path.string() + "\n";
      if (!loaded.report.invalidated.empty()) {
        std::string bytes;
        csv::append_row(bytes, {"Key", "Tag", "Value"});
        for (const auto& cell : loaded.report.invalidated) csv::append_row(bytes, {cell.key, cell.tag, cell.value});
        auto quarantine = stamp.path(base, "_quarantine");
        write_file(quarantine, bytes);
        body["quarantine_file"] = quarantine.string();
        plain += quarantine.string() + "\n";
      }
      print.result(body, plain);
      return kOk;
    }

    if (replace_cmd->parsed()) {
      auto schema = read_categories(c.categories);
      auto result = replace_option(read_database(c.db, schema), tag, old_option, new_option);
      auto base = default_out();
      auto stamp = free_stamp(base, now, {""});
      auto path = stamp.path(base);
      write_file(path, save_database(result.db, base.base, stamp.at).bytes);
      Json body{{"file", path.string()}, {"categories_dir", nullptr}, {"result", json::replace_result(result)}};
      if (!categories_out.empty()) {
        if (fs::exists(categories_out) && !fs::is_empty(categories_out)) {
          throw IoError(categories_out + " exists and is not empty");
        }
        write_categories_dir(result.db.schema(), categories_out);
        body["categories_dir"] = categories_out;
      } else if (!result.delta.empty()) {
        err << "note: the categories file still lists '" << old_option
            << "'; pass --categories-out to write the updated categories\n";
      }
      print.result(body, path.string() + "\n");
      return kOk;
    }

    if (counts_cmd->parsed()) {
      auto schema = read_categories(c.categories);
      auto db = read_database(c.db, schema);
      std::optional<std::vector<std::string>> keys;
      if (auto f = optional_filter(filter)) keys = eval_filter(db, *f);
      auto counts = option_counts(db, keys);
      print.result(json::option_counts(counts), counts_text(counts));
      return kOk;
    }

    if (crosstab_cmd->parsed()) {
      auto schema = read_categories(c.categories);
      auto tab = crosstab(read_database(c.db, schema), rows, cols, optional_filter(filter));
      print.result(json::crosstab(tab), crosstab_text(tab));
      return kOk;
    }

    if (filter_cmd->parsed()) {
      auto schema = read_categories(c.categories);
      auto db = read_database(c.db, schema);
      auto f = parse_filter(expr);
      if (!columns.empty()) {
        auto table = export_table(db, columns, f);
        print.result(Json{{"csv", table}}, table);
      } else {
        auto keys = eval_filter(db, f);
        std::string plain;
        for (const auto& k : keys) plain += k + "\n";
        print.result(Json{{"count", keys.size()}, {"keys", keys}}, plain);
      }
      return kOk;
    }

    if (report_cmd->parsed()) {
      auto schema = read_categories(c.categories);
      auto db = read_database(c.db, schema);
      auto spec_text = text::trim(spec_path).starts_with("{") ? spec_path : read_file(spec_path);
      auto html = build_report(db, parse_report_spec(spec_text), now);
      write_file(c.out, html);
      print.result(Json{{"file", c.out}, {"bytes", html.size()}}, c.out + "\n");
      return kOk;
    }

    if (serve_cmd->parsed()) {
      HttpOptions options;
      options.bind = !bind.empty() ? bind : (!env.bind.empty() ? env.bind : options.bind);
      options.port = port;
      options.allow_remote = allow_remote;
      options.static_dir = static_dir;
      Workspace ws(workspace, env.clock ? env.clock : Clock(utc_now));
      Service service(ws);
      HttpServer server(service, options);
      err << "serving " << fs::absolute(workspace).string() << " on http://" << options.bind << ":" << port << "\n";
      server.run();
      return kOk;
    }
  } catch (const Error& e) {
    err << "littag: " << e.what() << "\n";
    if (c.json) out << json::dump(Json{{"ok", false}, {"error", json::error_body(e)}});
    return e.code() == ErrorCode::StorageError ? kIo : kValidation;
  } catch (const IoError& e) {
    err << "littag: IoError: " << e.what() << "\n";
    if (c.json) out << json::dump(Json{{"ok", false}, {"error", {{"error", "IoError"}, {"detail", e.what()}}}});
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "littag: IoError: " << e.what() << "\n";
    return kIo;
  }
  return kValidation;
}

}  // namespace littag::cli
