#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "littag/citations.hpp"
#include "littag/schema.hpp"

namespace littag::testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(LITTAG_FIXTURE_DIR) / name; }

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << bytes;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("littag-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// The "Methods" group: StudyType (single Field/Lab/Model), Region (multi
// Arctic/Atlantic/Pacific), PubDate (date), Summary (note).
inline CategoriesSchema methods_schema() { return load_categories(fixture("cats").string()); }

// Three records: ABCD1234, EFGH5678, IJKL9012.
inline ZoteroExport fixture_export() { return parse_zotero_export(slurp(fixture("zotero.csv"))); }

}  // namespace littag::testing
