#include "littag/workspace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "littag/error.hpp"

namespace littag {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMetaFile = "meta.json";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::StorageError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes next to the target and renames into place.
void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(ErrorCode::StorageError, "cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::StorageError, "cannot rename into " + path.string());
  }
}

nlohmann::ordered_json meta_to_json(const DatabaseMeta& m) {
  nlohmann::ordered_json j;
  j["name"] = m.name;
  j["latest"] = m.latest;
  j["categories"] = m.categories;
  j["groups"] = m.groups;
  j["fingerprint"] = m.fingerprint;
  j["versions"] = m.versions;
  return j;
}

DatabaseMeta meta_from_json(const std::string& bytes) {
  auto j = nlohmann::json::parse(bytes);
  DatabaseMeta m;
  m.name = j.at("name").get<std::string>();
  m.latest = j.at("latest").get<std::string>();
  m.categories = j.at("categories").get<std::string>();
  m.groups = j.at("groups").get<std::vector<std::string>>();
  m.fingerprint = j.at("fingerprint").get<std::string>();
  m.versions = j.at("versions").get<std::vector<std::string>>();
  return m;
}

// Timestamp carried by a versioned file or snapshot directory name.
std::optional<UtcInstant> stamp_of(const fs::directory_entry& entry) {
  auto name = entry.path().filename().string();
  if (entry.is_directory()) name += ".csv";
  auto parsed = parse_versioned_filename(name);
  if (!parsed) return std::nullopt;
  return parsed->instant;
}

}  // namespace

Workspace::Workspace(fs::path root, Clock clock) : root_(std::move(root)), clock_(std::move(clock)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::StorageError, "cannot create workspace " + root_.string());
}

std::vector<std::string> Workspace::names() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::exists(entry.path() / kMetaFile)) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Workspace::exists(std::string_view name) const {
  if (name.empty() || name == "." || name == ".." || name.find_first_of("/\\") != std::string_view::npos) return false;
  return fs::exists(dir(name) / kMetaFile);
}

DatabaseMeta Workspace::meta(std::string_view name) const {
  if (!exists(name)) throw Error(ErrorCode::UnknownDatabase, std::string(name));
  try {
    return meta_from_json(read_file(dir(name) / kMetaFile));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::StorageError, std::string(name) + "/meta.json: " + e.what());
  }
}

CategoriesSchema Workspace::load_schema(const DatabaseMeta& meta) const {
  std::vector<GroupTable> tables;
  auto snapshot = dir(meta.name) / meta.categories;
  for (const auto& group : meta.groups) tables.push_back({group, read_file(snapshot / (group + ".csv"))});
  return parse_categories_tables(tables);
}

TagDatabase Workspace::load(const DatabaseMeta& meta) const {
  auto schema = load_schema(meta);
  return load_database(read_file(dir(meta.name) / meta.latest), schema, InvalidCellPolicy::Strict).db;
}

std::string Workspace::read_version(const DatabaseMeta& meta, std::string_view filename) const {
  if (std::find(meta.versions.begin(), meta.versions.end(), filename) == meta.versions.end()) {
    throw Error(ErrorCode::UnknownVersion, std::string(filename));
  }
  return read_file(dir(meta.name) / std::string(filename));
}

DatabaseMeta Workspace::create(std::string_view name, const TagDatabase& db) {
  check_base_name(name);
  auto path = dir(name);
  std::error_code ec;
  if (fs::exists(path / kMetaFile, ec)) throw Error(ErrorCode::DatabaseExists, std::string(name));
  fs::create_directories(path, ec);
  if (ec) throw Error(ErrorCode::StorageError, "cannot create " + path.string());
  return write_commit(nullptr, name, db, {}).meta;
}

Workspace::CommitResult Workspace::commit(const DatabaseMeta& current, const TagDatabase& db,
                                          const std::vector<Sidecar>& sidecars) {
  return write_commit(&current, current.name, db, sidecars);
}

UtcInstant Workspace::next_instant(std::string_view name) {
  std::lock_guard lock(mu_);
  auto it = last_instant_.find(name);
  if (it == last_instant_.end()) {
    // First commit since start-up: take the newest stamp on disk, including
    // files orphaned by an interrupted commit, so none is ever reused.
    UtcInstant newest{};
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir(name), ec)) {
      if (auto t = stamp_of(entry)) newest = std::max(newest, *t);
    }
    it = last_instant_.emplace(std::string(name), newest).first;
  }
  auto t = std::max(clock_(), it->second + std::chrono::seconds(1));
  it->second = t;
  return t;
}

void Workspace::stage(std::string_view name) const {
  if (fault_hook_) fault_hook_(name);
}

Workspace::CommitResult Workspace::write_commit(const DatabaseMeta* previous, std::string_view name,
                                                const TagDatabase& db, const std::vector<Sidecar>& sidecars) {
  auto path = dir(name);
  auto at = next_instant(name);
  CommitResult result;
  auto& meta = result.meta;
  if (previous) meta = *previous;
  meta.name = std::string(name);

  auto saved = save_database(db, name, at);
  write_file_atomic(path / saved.filename, saved.bytes);
  stage("csv-written");

  for (const auto& sidecar : sidecars) {
    auto filename = versioned_filename(std::string(name) + "_" + sidecar.label, at);
    write_file_atomic(path / filename, sidecar.bytes);
    result.sidecars.push_back(filename);
  }

  if (!previous || previous->fingerprint != db.schema_fingerprint()) {
    auto snapshot = versioned_filename("categories", at);
    snapshot.resize(snapshot.size() - 4);  // drop ".csv"
    auto tmp = path / (snapshot + ".tmp");
    std::error_code ec;
    fs::remove_all(tmp, ec);
    write_categories_dir(db.schema(), tmp.string());
    fs::rename(tmp, path / snapshot, ec);
    if (ec) throw Error(ErrorCode::StorageError, "cannot rename categories snapshot " + snapshot);
    meta.categories = snapshot;
    meta.groups.clear();
    for (const auto& group : db.schema().groups()) meta.groups.push_back(group.name);
    meta.fingerprint = db.schema_fingerprint();
    stage("categories-written");
  }

  meta.latest = saved.filename;
  meta.versions.push_back(saved.filename);
  stage("before-meta-swap");
  write_file_atomic(path / kMetaFile, meta_to_json(meta).dump(2) + "\n");
  return result;
}

}  // namespace littag
