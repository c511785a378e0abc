#include <gtest/gtest.h>

#include <chrono>

#include "fixtures.hpp"
#include "generators.hpp"
#include "littag/csv.hpp"
#include "littag/database.hpp"
#include "littag/error.hpp"
#include "littag/tagging.hpp"

namespace littag {
namespace {

using namespace std::chrono;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidRequest;
}

TagDatabase fixture_db() { return create_database(testing::fixture_export(), testing::methods_schema()); }

TEST(Database, CreateFromFixture) {
  auto db = fixture_db();
  ASSERT_EQ(db.size(), 3u);
  auto header = db.header();
  ASSERT_EQ(header.size(), 10u + 4u);
  EXPECT_EQ(header[0], "Key");
  EXPECT_EQ(header[10], "StudyType");
  EXPECT_EQ(header[13], "Summary");
  for (const auto& row : db.rows()) {
    for (const auto& cell : row.cells) EXPECT_TRUE(is_empty(cell));
  }
  EXPECT_EQ(db.rows()[0].key, "ABCD1234");
  EXPECT_EQ(db.cell_text(db.rows()[0], "Publication Year"), "2019");
}

TEST(Database, EmptyExport) {
  auto db = create_database(parse_zotero_export("Key,Item Type,Author,Title\n"), testing::methods_schema());
  EXPECT_TRUE(db.empty());
  EXPECT_EQ(db.header().size(), 14u);
  EXPECT_EQ(csv::parse(serialize_database(db)).size(), 1u);
}

TEST(Database, ReservedNameCollision) {
  auto schema = CategoriesSchema::unchecked({{"G", {{"Title", TagKind::Text, {}, "G"}}}});
  try {
    create_database(testing::fixture_export(), schema);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ColumnNameCollision);
    EXPECT_EQ(e.detail(), "Title");
  }
}

TEST(Database, SaveFilenameAndEncoding) {
  auto db = assign(fixture_db(), "ABCD1234", "Region", MultiOptions{{"Arctic", "Pacific"}});
  auto saved = save_database(db, "mydb", sys_days{2026y / 1 / 15} + 9h + 30min + 12s);
  EXPECT_EQ(saved.filename, "mydb_20260115T093012Z.csv");
  auto rows = csv::parse(saved.bytes);
  EXPECT_EQ(rows[1][11], "Arctic; Pacific");
  EXPECT_NE(saved.bytes.find("\r\n"), std::string::npos);
  EXPECT_EQ(code_of([&] { save_database(db, "a/b", sys_days{2026y / 1 / 1}); }), ErrorCode::InvalidBaseName);
}

TEST(Database, SaveLoadIdentity) {
  auto db = fixture_db();
  db = assign_text(db, "ABCD1234", "StudyType", "Lab");
  db = assign_text(db, "EFGH5678", "PubDate", "2021-03-04");
  db = assign_text(db, "EFGH5678", "Summary", "two\nlines, \"quoted\"");
  auto loaded = load_database(serialize_database(db), db.schema());
  EXPECT_EQ(loaded.db, db);
  EXPECT_TRUE(loaded.report.empty());
}

TEST(Database, LoadWithAddedTag) {
  auto db = fixture_db();
  auto groups = db.schema().groups();
  groups[0].tags.push_back({"Elevation", TagKind::Text, {}, "Methods"});
  CategoriesSchema wider(groups);
  auto loaded = load_database(serialize_database(db), wider);
  EXPECT_EQ(loaded.report.tags_added, (std::vector<std::string>{"Elevation"}));
  // The report agrees with schema_diff.
  auto delta = schema_diff(db.schema(), wider);
  ASSERT_EQ(delta.added_tags.size(), 1u);
  EXPECT_EQ(delta.added_tags[0].name, loaded.report.tags_added[0]);
  for (const auto& row : loaded.db.rows()) EXPECT_TRUE(is_empty(row.cells[*loaded.db.tag_index("Elevation")]));
}

TEST(Database, LoadQuarantinesInvalidCells) {
  auto bytes = serialize_database(assign_text(fixture_db(), "IJKL9012", "StudyType", "Lab"));
  auto pos = bytes.find("Lab");
  bytes.replace(pos, 3, "Greenhouse");
  auto loaded = load_database(bytes, testing::methods_schema());
  EXPECT_TRUE(is_empty(loaded.db.find("IJKL9012")->cells[0]));
  ASSERT_EQ(loaded.report.invalidated.size(), 1u);
  EXPECT_EQ(loaded.report.invalidated[0], (InvalidatedCell{"IJKL9012", "StudyType", "Greenhouse"}));
  EXPECT_EQ(code_of([&] { load_database(bytes, testing::methods_schema(), InvalidCellPolicy::Strict); }),
            ErrorCode::InvalidCell);
}

// Validation oracle: every cell checked against the option lists by hand.
TEST(Database, LoadValidationOracle) {
  testing::Rng rng(23);
  for (int iter = 0; iter < 60; ++iter) {
    auto schema = testing::random_schema(rng, {.awkward_names = false});
    auto db = testing::random_database(rng, schema, testing::random_export(rng, {.rows = 15}));
    auto grid = csv::parse(serialize_database(db));
    // Corrupt some cells.
    for (std::size_t r = 1; r < grid.size(); ++r) {
      for (std::size_t c = 10; c < grid[r].size(); ++c) {
        if (testing::chance(rng, 0.1)) grid[r][c] = testing::chance(rng, 0.5) ? "bogus" : "2021-02-30";
      }
    }
    auto loaded = load_database(csv::write(grid), schema);
    std::vector<InvalidatedCell> expected;
    for (std::size_t r = 1; r < grid.size(); ++r) {
      for (std::size_t c = 10; c < grid[r].size(); ++c) {
        const auto* tag = schema.find(grid[0][c]);
        const auto& v = grid[r][c];
        bool ok = true;
        if (v.empty()) {
          ok = true;
        } else if (tag->kind == TagKind::Single) {
          ok = tag->has_option(v);
        } else if (tag->kind == TagKind::Multi) {
          std::size_t start = 0;
          while (ok && start <= v.size()) {
            auto end = v.find("; ", start);
            if (end == std::string::npos) end = v.size();
            ok = tag->has_option(v.substr(start, end - start));
            start = end + 2;
          }
        } else if (tag->kind == TagKind::Date) {
          ok = parse_date(v).has_value();
        }
        if (!ok) expected.push_back({grid[r][0], grid[0][c], v});
      }
    }
    EXPECT_EQ(loaded.report.invalidated, expected) << "iteration " << iter;
  }
}

TEST(Database, LoadErrors) {
  auto schema = testing::methods_schema();
  EXPECT_EQ(code_of([&] { load_database("Title,StudyType\nx,Lab\n", schema); }), ErrorCode::MissingKeyColumn);
  EXPECT_EQ(code_of([&] { load_database("Key,StudyType\nA,Lab\nA,Field\n", schema); }), ErrorCode::DuplicateKey);
  EXPECT_EQ(code_of([&] { load_database("Key,StudyType\nA,\"Lab\n", schema); }), ErrorCode::MalformedCsv);
}

TEST(Database, LoadCountsDroppedColumns) {
  auto loaded = load_database("Key,StudyType,Old\nA,Lab,x\nB,,\n", testing::methods_schema());
  ASSERT_EQ(loaded.report.tags_removed.size(), 1u);
  EXPECT_EQ(loaded.report.tags_removed[0], (RemovedTag{"Old", 1}));
}

CategoriesSchema methods_without_lab() {
  auto groups = testing::methods_schema().groups();
  auto& options = groups[0].tags[0].options;
  options.erase(options.begin() + 1);
  return CategoriesSchema(groups);
}

TEST(Conform, SameSchemaIsIdentity) {
  auto db = assign_text(fixture_db(), "ABCD1234", "Region", "Arctic; Atlantic");
  auto out = conform(db, db.schema());
  EXPECT_EQ(out.db, db);
  EXPECT_TRUE(out.report.empty());
}

TEST(Conform, RemovedOptionQuarantinesCells) {
  auto db = assign_text(fixture_db(), "ABCD1234", "StudyType", "Lab");
  db = assign_text(db, "EFGH5678", "StudyType", "Lab");
  db = assign_text(db, "IJKL9012", "StudyType", "Field");
  auto out = conform(db, methods_without_lab());
  // Count oracle: cells holding the removed option.
  std::size_t affected = 0;
  for (const auto& row : db.rows()) affected += serialize_cell(row.cells[0]) == "Lab";
  EXPECT_EQ(out.report.invalidated.size(), affected);
  EXPECT_EQ(affected, 2u);
  EXPECT_EQ(serialize_cell(out.db.find("IJKL9012")->cells[0]), "Field");
  EXPECT_EQ(out.report.schema_delta.removed_options, (std::vector<TagOption>{{"StudyType", "Lab"}}));
}

TEST(Conform, AddAndRemoveThenIdempotent) {
  auto db = assign_text(fixture_db(), "ABCD1234", "Summary", "keep me");
  db = assign_text(db, "ABCD1234", "PubDate", "2020-01-01");
  auto groups = db.schema().groups();
  groups[0].tags.erase(groups[0].tags.begin() + 2);  // PubDate
  groups[0].tags.push_back({"Elevation", TagKind::Text, {}, "Methods"});
  CategoriesSchema next(groups);
  auto out = conform(db, next);
  EXPECT_EQ(out.report.tags_added, (std::vector<std::string>{"Elevation"}));
  ASSERT_EQ(out.report.tags_removed.size(), 1u);
  EXPECT_EQ(out.report.tags_removed[0], (RemovedTag{"PubDate", 1}));
  EXPECT_EQ(serialize_cell(out.db.find("ABCD1234")->cells[*out.db.tag_index("Summary")]), "keep me");
  auto again = conform(out.db, next);
  EXPECT_TRUE(again.report.empty());
  EXPECT_EQ(again.db, out.db);
}

TEST(Conform, KindChangeRevalidates) {
  auto db = assign_text(fixture_db(), "ABCD1234", "Region", "Arctic; Pacific");
  db = assign_text(db, "EFGH5678", "Region", "Atlantic");
  auto groups = db.schema().groups();
  groups[0].tags[1].kind = TagKind::Single;
  auto out = conform(db, CategoriesSchema(groups));
  EXPECT_EQ(out.report.invalidated.size(), 1u);
  EXPECT_EQ(serialize_cell(out.db.find("EFGH5678")->cells[1]), "Atlantic");
  EXPECT_EQ(out.report.schema_delta.kind_changed.size(), 1u);
}

TEST(Database, RandomRoundTripIsByteStable) {
  testing::Rng rng(29);
  for (int iter = 0; iter < 100; ++iter) {
    auto schema = testing::random_schema(rng);
    auto db = testing::random_database(rng, schema, testing::random_export(rng, {.rows = testing::uniform(rng, 0, 40)}));
    auto bytes = serialize_database(db);
    auto loaded = load_database(bytes, schema);
    ASSERT_EQ(loaded.db, db) << "iteration " << iter;
    ASSERT_TRUE(loaded.report.empty());
    ASSERT_EQ(serialize_database(loaded.db), bytes);
    db.validate();
  }
}

TEST(KeyedTable, MovesKeyFirst) {
  auto t = parse_keyed_table("Title,Key\nx,A\ny,B\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"Key", "Title"}));
  EXPECT_EQ(t.rows[1], (csv::Row{"B", "y"}));
  auto db = fixture_db();
  EXPECT_EQ(parse_keyed_table(serialize_database(db)), to_keyed_table(db));
}

}  // namespace
}  // namespace littag
