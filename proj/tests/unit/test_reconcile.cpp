#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "generators.hpp"
#include "littag/error.hpp"
#include "littag/reconcile.hpp"
#include "littag/tagging.hpp"

namespace littag {
namespace {

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

std::set<std::string> key_set(const TagDatabase& db) {
  std::set<std::string> out;
  for (const auto& row : db.rows()) out.insert(row.key);
  return out;
}

std::set<std::string> key_set(const ZoteroExport& exp) {
  std::set<std::string> out;
  for (const auto& rec : exp.records) out.insert(rec.key);
  return out;
}

ZoteroExport with_extra_record(ZoteroExport exp, const std::string& key) {
  auto rec = exp.records.back();
  rec.key = key;
  rec.title = "A fresh paper";
  rec.doi = "10.9999/fresh";
  exp.records.push_back(rec);
  return exp;
}

TEST(Sync, FixedPoint) {
  auto exp = testing::fixture_export();
  auto db = assign_text(create_database(exp, testing::methods_schema()), "ABCD1234", "StudyType", "Lab");
  auto out = sync(db, exp);
  EXPECT_EQ(out.db, db);
  EXPECT_TRUE(out.report.empty());
}

TEST(Sync, AddedKey) {
  auto db = fixture_db();
  auto out = sync(db, with_extra_record(testing::fixture_export(), "MNOP3456"));
  EXPECT_EQ(out.report.added, (std::vector<std::string>{"MNOP3456"}));
  ASSERT_TRUE(out.db.contains("MNOP3456"));
  for (const auto& c : out.db.find("MNOP3456")->cells) EXPECT_TRUE(is_empty(c));
  EXPECT_EQ(out.db.rows().back().key, "MNOP3456");
}

TEST(Sync, RemovedKeyKeepsTags) {
  auto db = assign_text(fixture_db(), "EFGH5678", "StudyType", "Lab");
  auto exp = testing::fixture_export();
  exp.records.erase(exp.records.begin() + 1);
  auto out = sync(db, exp);
  EXPECT_FALSE(out.db.contains("EFGH5678"));
  ASSERT_EQ(out.report.removed.size(), 1u);
  EXPECT_EQ(out.report.removed[0].key, "EFGH5678");
  EXPECT_EQ(serialize_cell(out.report.removed[0].cells[0]), "Lab");
  auto archive = archive_of(db, out.report.removed);
  EXPECT_EQ(archive.size(), 1u);
  EXPECT_EQ(archive.cell_text(archive.rows()[0], "StudyType"), "Lab");
}

TEST(Sync, RefreshesCitationsButNotTags) {
  auto db = assign_text(fixture_db(), "ABCD1234", "StudyType", "Field");
  auto exp = testing::fixture_export();
  exp.records[0].title = "Corrected title";
  auto out = sync(db, exp);
  ASSERT_EQ(out.report.updated.size(), 1u);
  EXPECT_EQ(out.report.updated[0].changes, (std::vector<ColumnChange>{
                                               {"Title", "Sea-ice algae under changing light regimes", "Corrected title"}}));
  EXPECT_EQ(out.db.cell_text(*out.db.find("ABCD1234"), "Title"), "Corrected title");
  EXPECT_EQ(out.db.cell_text(*out.db.find("ABCD1234"), "StudyType"), "Field");
}

TEST(Sync, RandomPerturbations) {
  testing::Rng rng(41);
  for (int iter = 0; iter < 80; ++iter) {
    auto schema = testing::random_schema(rng);
    auto exp = testing::random_export(rng, {.rows = testing::uniform(rng, 0, 25)});
    auto db = testing::random_database(rng, schema, exp);
    auto next = testing::perturb_export(rng, exp, 0.3, testing::uniform(rng, 0, 5));
    auto out = sync(db, next);

    EXPECT_EQ(key_set(out.db), key_set(next));
    std::set<std::string> added(out.report.added.begin(), out.report.added.end());
    std::set<std::string> removed;
    for (const auto& r : out.report.removed) removed.insert(r.key);
    for (const auto& k : added) EXPECT_FALSE(removed.count(k));
    for (const auto& k : key_set(next)) EXPECT_EQ(added.count(k) == 1, !db.contains(k));
    for (const auto& k : key_set(db)) EXPECT_EQ(removed.count(k) == 1, !key_set(next).count(k));
    // Surviving rows keep their tags.
    for (const auto& row : out.db.rows()) {
      if (const auto* old = db.find(row.key)) EXPECT_EQ(row.cells, old->cells);
    }
    // Idempotence.
    auto again = sync(out.db, next);
    EXPECT_EQ(again.db, out.db);
    EXPECT_TRUE(again.report.empty());
    // Diff reproduces the key-set changes.
    auto d = diff(db, out.db);
    EXPECT_EQ(std::set<std::string>(d.only_in_a.begin(), d.only_in_a.end()), removed);
    EXPECT_EQ(std::set<std::string>(d.only_in_b.begin(), d.only_in_b.end()), added);
  }
}

TEST(Diff, IdentityAndSingleEdit) {
  auto db = fixture_db();
  EXPECT_TRUE(diff(db, db).empty());
  auto edited = assign_text(db, "EFGH5678", "StudyType", "Lab");
  auto d = diff(db, edited);
  ASSERT_EQ(d.changed.size(), 1u);
  EXPECT_EQ(d.changed[0], (CellChange{"EFGH5678", "StudyType", "", "Lab"}));
  EXPECT_TRUE(d.only_in_a.empty());
}

TEST(Diff, SymmetricUpToRoles) {
  testing::Rng rng(43);
  for (int iter = 0; iter < 40; ++iter) {
    auto schema = testing::random_schema(rng);
    auto exp = testing::random_export(rng, {.rows = 12});
    auto a = testing::random_database(rng, schema, exp);
    auto b = sync(testing::random_database(rng, schema, exp), testing::perturb_export(rng, exp, 0.2, 3)).db;
    auto ab = diff(a, b);
    auto ba = diff(b, a);
    EXPECT_EQ(ab.only_in_a, ba.only_in_b);
    EXPECT_EQ(ab.only_in_b, ba.only_in_a);
    ASSERT_EQ(ab.changed.size(), ba.changed.size());
    for (std::size_t i = 0; i < ab.changed.size(); ++i) {
      EXPECT_EQ(ab.changed[i].value_a, ba.changed[i].value_b);
      EXPECT_EQ(ab.changed[i].key, ba.changed[i].key);
    }
  }
}

TEST(Diff, ColumnsOnlyOnOneSide) {
  auto a = parse_keyed_table("Key,X,Y\nA,1,2\n");
  auto b = parse_keyed_table("Key,Y,Z\nA,3,4\n");
  auto d = diff(a, b);
  EXPECT_EQ(d.columns_only_in_a, (std::vector<std::string>{"X"}));
  EXPECT_EQ(d.columns_only_in_b, (std::vector<std::string>{"Z"}));
  EXPECT_EQ(d.changed, (std::vector<CellChange>{{"A", "Y", "2", "3"}}));
}

TEST(Merge, SelfMergeFirstWins) {
  auto db = assign_text(fixture_db(), "ABCD1234", "StudyType", "Lab");
  auto out = merge({db, db}, MergePolicy::FirstWins);
  EXPECT_EQ(out.db, db);
  EXPECT_EQ(out.report.duplicates.size(), 3u);
  EXPECT_TRUE(out.report.duplicates[0].identical);
  // Identical copies are not a conflict.
  EXPECT_EQ(merge({db, db}, MergePolicy::Error).db, db);
}

TEST(Merge, ConflictPolicies) {
  auto a = assign_text(fixture_db(), "ABCD1234", "StudyType", "Lab");
  auto b = assign_text(fixture_db(), "ABCD1234", "StudyType", "Field");
  try {
    merge({a, b}, MergePolicy::Error);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateKeyConflict);
    EXPECT_EQ(e.detail(), "ABCD1234");
  }
  auto first = merge({a, b}, MergePolicy::FirstWins);
  EXPECT_EQ(first.db.cell_text(*first.db.find("ABCD1234"), "StudyType"), "Lab");
  auto last = merge({a, b}, MergePolicy::LastWins);
  EXPECT_EQ(last.db.cell_text(*last.db.find("ABCD1234"), "StudyType"), "Field");
  EXPECT_EQ(last.report.output_rows, 3u);
  const auto& dup = *std::find_if(last.report.duplicates.begin(), last.report.duplicates.end(),
                                  [](const DuplicateResolution& d) { return d.key == "ABCD1234"; });
  EXPECT_EQ(dup.winner, 1u);
  EXPECT_FALSE(dup.identical);
}

TEST(Merge, ColumnSetMismatchAndArity) {
  auto a = fixture_db();
  auto groups = a.schema().groups();
  groups[0].tags.pop_back();
  auto b = create_database(testing::fixture_export(), CategoriesSchema(groups));
  EXPECT_EQ(code_of([&] { merge({a, b}, MergePolicy::FirstWins); }), ErrorCode::ColumnSetMismatch);
  EXPECT_EQ(code_of([&] { merge(std::vector<TagDatabase>{a}, MergePolicy::FirstWins); }),
            ErrorCode::NotEnoughDatabases);
}

TEST(Merge, PolicyNames) {
  EXPECT_EQ(parse_merge_policy("first-wins"), MergePolicy::FirstWins);
  EXPECT_EQ(parse_merge_policy("LastWins"), MergePolicy::LastWins);
  EXPECT_EQ(parse_merge_policy("error"), MergePolicy::Error);
  EXPECT_THROW(parse_merge_policy("coin-flip"), Error);
}

// Partition equivalence: tagging split across k collaborators and merged
// equals tagging one database.
TEST(Merge, PartitionsEqualWhole) {
  testing::Rng rng(47);
  for (std::size_t k : {2u, 3u, 5u}) {
    for (int iter = 0; iter < 10; ++iter) {
      auto schema = testing::random_schema(rng);
      auto exp = testing::random_export(rng, {.rows = 30});
      auto whole = testing::random_database(rng, schema, exp);
      std::vector<ZoteroExport> parts(k);
      for (auto& p : parts) p.header = exp.header;
      for (const auto& rec : exp.records) parts[testing::uniform(rng, 0, k - 1)].records.push_back(rec);
      std::vector<TagDatabase> dbs;
      for (const auto& p : parts) {
        auto part = create_database(p, schema);
        for (std::size_t r = 0; r < part.size(); ++r) part.row_at(r).cells = whole.find(part.rows()[r].key)->cells;
        dbs.push_back(part);
      }
      auto merged = merge(dbs, MergePolicy::Error);
      EXPECT_EQ(merged.db.size(), whole.size());
      EXPECT_TRUE(diff(merged.db, whole).empty());
      std::size_t sum = 0;
      for (auto n : merged.report.source_rows) sum += n;
      EXPECT_EQ(sum, whole.size());
    }
  }
}

TEST(Merge, TablesWithoutSchema) {
  auto a = parse_keyed_table("Key,T\nA,1\nB,2\n");
  auto b = parse_keyed_table("Key,T\nB,3\nC,4\n");
  auto out = merge(std::vector<KeyedTable>{a, b}, MergePolicy::LastWins);
  EXPECT_EQ(out.table.rows, (std::vector<csv::Row>{{"A", "1"}, {"B", "3"}, {"C", "4"}}));
  EXPECT_EQ(code_of([&] { merge(std::vector<KeyedTable>{a, b}, MergePolicy::Error); }),
            ErrorCode::DuplicateKeyConflict);
}

TEST(Relink, RekeyedLibraryFullyMatches) {
  testing::Rng rng(53);
  for (int iter = 0; iter < 20; ++iter) {
    auto schema = testing::random_schema(rng);
    auto exp = testing::random_export(rng, {.rows = 25});
    auto db = testing::random_database(rng, schema, exp);
    auto fresh = testing::rekey_export(rng, exp);
    auto out = relink(db, fresh);
    EXPECT_EQ(out.report.matched.size(), db.size());
    EXPECT_TRUE(out.report.unmatched_rows.empty());
    EXPECT_TRUE(out.report.ambiguous.empty());
    std::set<std::string> olds;
    std::set<std::string> news;
    for (std::size_t r = 0; r < db.size(); ++r) {
      EXPECT_EQ(out.db.rows()[r].cells, db.rows()[r].cells);
      EXPECT_EQ(out.db.rows()[r].key, out.report.matched[r].new_key);
      olds.insert(out.report.matched[r].old_key);
      news.insert(out.report.matched[r].new_key);
    }
    EXPECT_EQ(olds.size(), db.size());
    EXPECT_EQ(news.size(), db.size());
    EXPECT_EQ(news, key_set(fresh));
  }
}

TEST(Relink, TitleYearFallbackAndNoMatch) {
  auto db = assign_text(fixture_db(), "IJKL9012", "StudyType", "Model");
  db = assign_text(db, "EFGH5678", "StudyType", "Lab");
  auto exp = testing::fixture_export();
  exp.records[0].key = "NEW00001";
  exp.records[2].key = "NEW00003";
  exp.records[2].title = "MODELLING plankton phenology.";
  exp.records.erase(exp.records.begin() + 1);
  auto out = relink(db, exp);
  ASSERT_EQ(out.report.matched.size(), 2u);
  EXPECT_EQ(out.report.matched[0], (RelinkPair{"ABCD1234", "NEW00001", MatchedBy::Doi}));
  EXPECT_EQ(out.report.matched[1], (RelinkPair{"IJKL9012", "NEW00003", MatchedBy::TitleYear}));
  EXPECT_EQ(out.report.unmatched_rows, (std::vector<std::string>{"EFGH5678"}));
  EXPECT_EQ(out.db.cell_text(*out.db.find("EFGH5678"), "StudyType"), "Lab");
  EXPECT_EQ(out.db.cell_text(*out.db.find("NEW00003"), "StudyType"), "Model");
}

TEST(Relink, AmbiguityIsReportedNotThrown) {
  auto db = fixture_db();
  auto exp = testing::fixture_export();
  auto twin = exp.records[0];
  twin.key = "TWIN0001";
  exp.records.push_back(twin);
  auto out = relink(db, exp);
  ASSERT_FALSE(out.report.ambiguous.empty());
  EXPECT_EQ(out.report.ambiguous[0].signature, "doi:10.1007/s00300-019-02500-1");
  EXPECT_TRUE(std::find(out.report.unmatched_rows.begin(), out.report.unmatched_rows.end(), "ABCD1234") !=
              out.report.unmatched_rows.end());
}

}  // namespace
}  // namespace littag
