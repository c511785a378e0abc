#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "littag/database.hpp"
#include "littag/schema.hpp"
#include "littag/timestamp.hpp"

namespace littag {

// Committed state of one database directory, as recorded in its meta.json.
struct DatabaseMeta {
  std::string name;
  std::string latest;      // newest committed CSV filename
  std::string categories;  // categories snapshot directory name
  std::vector<std::string> groups;  // group order of the snapshot
  std::string fingerprint;
  std::vector<std::string> versions;  // committed CSV filenames, oldest first

  friend bool operator==(const DatabaseMeta&, const DatabaseMeta&) = default;
};

/// On-disk layout:
///
///   <root>/<name>/meta.json
///   <root>/<name>/<name>_YYYYMMDDTHHMMSSZ.csv          one per commit
///   <root>/<name>/categories_YYYYMMDDTHHMMSSZ/*.csv     one per schema change
///   <root>/<name>/<name>_removed_YYYYMMDDTHHMMSSZ.csv  rows dropped by sync
///
/// A commit writes the new files first and then replaces meta.json with a
/// rename, so a crash at any point leaves the previous commit current.
/// Files are never overwritten; a commit in the same second as the previous
/// one is stamped one second later.
///
/// Callers serialize commits per database; the class itself only guards its
/// timestamp bookkeeping.
class Workspace {
 public:
  // Called with a stage name at each step of a commit. Tests throw from it
  // to simulate a crash.
  using FaultHook = std::function<void(std::string_view stage)>;

  explicit Workspace(std::filesystem::path root, Clock clock = utc_now);

  const std::filesystem::path& root() const noexcept { return root_; }
  UtcInstant now() const { return clock_(); }

  // Names of databases with a readable meta.json, sorted.
  std::vector<std::string> names() const;
  bool exists(std::string_view name) const;

  // Throws UnknownDatabase.
  DatabaseMeta meta(std::string_view name) const;
  CategoriesSchema load_schema(const DatabaseMeta& meta) const;
  TagDatabase load(const DatabaseMeta& meta) const;

  // Raw bytes of a committed version; throws UnknownVersion.
  std::string read_version(const DatabaseMeta& meta, std::string_view filename) const;

  // Creates the directory and first commit; throws DatabaseExists, InvalidBaseName.
  DatabaseMeta create(std::string_view name, const TagDatabase& db);

  struct Sidecar {
    std::string label;  // "<name>_<label>_<ts>Z.csv"
    std::string bytes;
  };

  struct CommitResult {
    DatabaseMeta meta;
    std::vector<std::string> sidecars;  // filenames, in argument order
  };

  // Writes a new version (and a categories snapshot when the schema
  // fingerprint changed), then swaps meta.json. Throws StorageError.
  CommitResult commit(const DatabaseMeta& current, const TagDatabase& db, const std::vector<Sidecar>& sidecars = {});

  void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }

 private:
  std::filesystem::path dir(std::string_view name) const { return root_ / std::string(name); }
  UtcInstant next_instant(std::string_view name);
  void stage(std::string_view name) const;
  CommitResult write_commit(const DatabaseMeta* previous, std::string_view name, const TagDatabase& db,
                            const std::vector<Sidecar>& sidecars);

  std::filesystem::path root_;
  Clock clock_;
  FaultHook fault_hook_;
  mutable std::mutex mu_;
  std::map<std::string, UtcInstant, std::less<>> last_instant_;
};

}  // namespace littag
