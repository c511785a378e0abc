#include <gtest/gtest.h>

#include <map>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracle.hpp"
#include "littag/error.hpp"
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

std::string cell(const TagDatabase& db, const std::string& key, const std::string& tag) {
  return db.cell_text(*db.find(key), tag);
}

TEST(Assign, SingleOptionReadsBack) {
  auto db = assign(fixture_db(), "ABCD1234", "StudyType", SingleOption{"Lab"});
  EXPECT_EQ(cell(db, "ABCD1234", "StudyType"), "Lab");
  EXPECT_EQ(cell(db, "EFGH5678", "StudyType"), "");
}

TEST(Assign, Errors) {
  auto db = fixture_db();
  EXPECT_EQ(code_of([&] { assign(db, "ABCD1234", "StudyType", MultiOptions{{"Lab"}}); }), ErrorCode::KindMismatch);
  EXPECT_EQ(code_of([&] { assign(db, "NOPE0000", "StudyType", SingleOption{"Lab"}); }), ErrorCode::UnknownKey);
  EXPECT_EQ(code_of([&] { assign(db, "ABCD1234", "Nope", SingleOption{"Lab"}); }), ErrorCode::UnknownTag);
  EXPECT_EQ(code_of([&] { assign(db, "ABCD1234", "StudyType", SingleOption{"Greenhouse"}); }),
            ErrorCode::UnknownOption);
  EXPECT_EQ(code_of([&] { assign(db, "ABCD1234", "Summary", TextValue{"x"}); }), ErrorCode::KindMismatch);
  EXPECT_EQ(code_of([&] { assign_text(db, "ABCD1234", "PubDate", "2021-02-30"); }), ErrorCode::InvalidCell);
}

TEST(Assign, MultiStoredInSchemaOrder) {
  auto db = assign(fixture_db(), "ABCD1234", "Region", MultiOptions{{"Pacific", "Arctic"}});
  EXPECT_EQ(std::get<MultiOptions>(db.find("ABCD1234")->cells[1]).options,
            (std::vector<std::string>{"Arctic", "Pacific"}));
  EXPECT_EQ(cell(db, "ABCD1234", "Region"), "Arctic; Pacific");
}

TEST(Assign, TextFormMirrorsFileEncoding) {
  auto db = assign_text(fixture_db(), "ABCD1234", "Region", "Pacific; Arctic; Pacific");
  EXPECT_EQ(cell(db, "ABCD1234", "Region"), "Arctic; Pacific");
  db = assign_text(db, "ABCD1234", "Region", "");
  EXPECT_EQ(cell(db, "ABCD1234", "Region"), "");
  db = assign_text(db, "ABCD1234", "PubDate", "2020-02-29");
  EXPECT_EQ(cell(db, "ABCD1234", "PubDate"), "2020-02-29");
}

TEST(Assign, DoesNotMutateInput) {
  auto db = fixture_db();
  auto copy = db;
  (void)assign_text(db, "ABCD1234", "StudyType", "Lab");
  EXPECT_EQ(db, copy);
}

TEST(Toggle, Examples) {
  auto db = fixture_db();
  auto once = toggle_option(db, "ABCD1234", "Region", "Arctic");
  EXPECT_EQ(cell(once, "ABCD1234", "Region"), "Arctic");
  EXPECT_EQ(toggle_option(once, "ABCD1234", "Region", "Arctic"), db);
  auto two = toggle_option(once, "ABCD1234", "Region", "Pacific");
  EXPECT_EQ(cell(two, "ABCD1234", "Region"), "Arctic; Pacific");
  EXPECT_EQ(code_of([&] { toggle_option(db, "ABCD1234", "StudyType", "Lab"); }), ErrorCode::KindMismatch);
  EXPECT_EQ(code_of([&] { toggle_option(db, "ABCD1234", "Region", "Indian"); }), ErrorCode::UnknownOption);
}

TEST(Toggle, InvolutionProperty) {
  testing::Rng rng(31);
  for (int iter = 0; iter < 100; ++iter) {
    auto schema = testing::random_schema(rng);
    auto db = testing::random_database(rng, schema, testing::random_export(rng, {.rows = 5}));
    for (const auto& tag : db.tag_columns()) {
      if (tag.kind != TagKind::Multi || db.empty()) continue;
      const auto& key = db.rows()[testing::uniform(rng, 0, db.size() - 1)].key;
      const auto& option = testing::pick(rng, tag.options);
      EXPECT_EQ(toggle_option(toggle_option(db, key, tag.name, option), key, tag.name, option), db);
    }
  }
}

TEST(Clear, Examples) {
  auto db = fixture_db();
  EXPECT_EQ(clear(db, "ABCD1234", "StudyType"), db);
  EXPECT_EQ(clear(assign_text(db, "ABCD1234", "StudyType", "Lab"), "ABCD1234", "StudyType"), db);
  EXPECT_EQ(code_of([&] { clear(db, "BADKEY00", "StudyType"); }), ErrorCode::UnknownKey);
  EXPECT_EQ(code_of([&] { clear(db, "ABCD1234", "Nope"); }), ErrorCode::UnknownTag);
}

TEST(Counts, EmptyDatabase) {
  auto db = create_database(parse_zotero_export("Key,Item Type,Author,Title\n"), testing::methods_schema());
  auto counts = option_counts(db);
  EXPECT_EQ(counts.rows, 0u);
  for (const auto& t : counts.tags) {
    for (const auto& e : t.entries) EXPECT_EQ(e.count, 0u);
  }
}

TEST(Counts, SingleAndMulti) {
  auto db = assign_text(fixture_db(), "ABCD1234", "StudyType", "Lab");
  db = assign_text(db, "EFGH5678", "StudyType", "Lab");
  db = assign_text(db, "IJKL9012", "StudyType", "Lab");
  db = assign_text(db, "ABCD1234", "Region", "Arctic; Pacific");
  db = assign_text(db, "EFGH5678", "Region", "Arctic");
  std::vector<std::string> two = {"ABCD1234", "EFGH5678"};
  auto counts = option_counts(db, two);
  const auto* study = counts.find("StudyType");
  EXPECT_EQ(study->entries, (std::vector<LabelCount>{{"Field", 0}, {"Lab", 2}, {"Model", 0}, {"(none)", 0}}));
  const auto* region = counts.find("Region");
  EXPECT_EQ(region->entries, (std::vector<LabelCount>{{"Arctic", 2}, {"Atlantic", 0}, {"Pacific", 1}, {"(none)", 0}}));
  EXPECT_EQ(counts.find("Summary")->entries, (std::vector<LabelCount>{{"(non-empty)", 0}, {"(none)", 2}}));
  EXPECT_EQ(code_of([&] { option_counts(db, std::vector<std::string>{"NOPE"}); }), ErrorCode::UnknownKey);
}

// Brute-force tally oracle plus the conservation invariants.
TEST(Counts, TallyOracle) {
  testing::Rng rng(37);
  for (int iter = 0; iter < 100; ++iter) {
    auto schema = testing::random_schema(rng);
    auto db = testing::random_database(rng, schema, testing::random_export(rng, {.rows = testing::uniform(rng, 0, 30)}));
    auto counts = option_counts(db);
    for (const auto& tc : counts.tags) {
      const auto* def = schema.find(tc.tag);
      auto t = *db.tag_index(tc.tag);
      std::map<std::string, std::size_t> tally;
      std::size_t none = 0;
      std::size_t any = 0;
      for (const auto& row : db.rows()) {
        auto text = serialize_cell(row.cells[t]);
        if (text.empty()) {
          ++none;
          continue;
        }
        ++any;
        if (is_selection(def->kind)) {
          for (const auto& m : testing::oracle_labels(text)) ++tally[m];
        }
      }
      EXPECT_EQ(tc.count("(none)"), none);
      if (is_selection(def->kind)) {
        std::size_t sum = 0;
        for (const auto& o : def->options) {
          EXPECT_EQ(tc.count(o), tally[o]) << tc.tag << "/" << o;
          sum += tc.count(o);
        }
        if (def->kind == TagKind::Single) EXPECT_EQ(sum + none, db.size());
        if (def->kind == TagKind::Multi) EXPECT_GE(sum + none, db.size());
      } else {
        EXPECT_EQ(tc.count("(non-empty)"), any);
      }
      EXPECT_EQ(none + any, db.size());
    }
  }
}

CategoriesSchema methods_with_polar() {
  auto groups = testing::methods_schema().groups();
  groups[0].tags[1].options.push_back("Polar");
  return CategoriesSchema(groups);
}

TEST(Replace, RenameCountsCells) {
  auto db = assign_text(fixture_db(), "ABCD1234", "StudyType", "Lab");
  db = assign_text(db, "EFGH5678", "StudyType", "Lab");
  db = assign_text(db, "IJKL9012", "StudyType", "Model");
  auto r = replace_option(db, "StudyType", "Lab", "Laboratory");
  EXPECT_EQ(r.cells_changed, 2u);
  EXPECT_FALSE(r.merged);
  for (const auto& row : r.db.rows()) EXPECT_NE(r.db.cell_text(row, "StudyType"), "Lab");
  EXPECT_EQ(option_counts(r.db).find("StudyType")->count("Laboratory"), 2u);
  EXPECT_EQ(r.db.schema().find("StudyType")->options, (std::vector<std::string>{"Field", "Laboratory", "Model"}));
  EXPECT_EQ(r.delta.removed_options, (std::vector<TagOption>{{"StudyType", "Lab"}}));
  EXPECT_EQ(r.delta.added_options, (std::vector<TagOption>{{"StudyType", "Laboratory"}}));
}

TEST(Replace, MultiMergeDeduplicates) {
  auto db = create_database(testing::fixture_export(), methods_with_polar());
  db = assign_text(db, "ABCD1234", "Region", "Arctic; Polar");
  auto r = replace_option(db, "Region", "Polar", "Arctic");
  EXPECT_TRUE(r.merged);
  EXPECT_EQ(r.cells_changed, 1u);
  EXPECT_EQ(cell(r.db, "ABCD1234", "Region"), "Arctic");
  EXPECT_FALSE(r.db.schema().find("Region")->has_option("Polar"));
}

TEST(Replace, IdentityAndErrors) {
  auto db = assign_text(fixture_db(), "ABCD1234", "StudyType", "Lab");
  auto r = replace_option(db, "StudyType", "Lab", "Lab");
  EXPECT_EQ(r.cells_changed, 0u);
  EXPECT_EQ(r.db, db);
  EXPECT_EQ(code_of([&] { replace_option(db, "Nope", "a", "b"); }), ErrorCode::UnknownTag);
  EXPECT_EQ(code_of([&] { replace_option(db, "Summary", "a", "b"); }), ErrorCode::KindMismatch);
  EXPECT_EQ(code_of([&] { replace_option(db, "StudyType", "Greenhouse", "b"); }), ErrorCode::UnknownOption);
  EXPECT_EQ(code_of([&] { replace_option(db, "StudyType", "Lab", "a;b"); }), ErrorCode::InvalidOption);
  EXPECT_EQ(code_of([&] { replace_option(db, "StudyType", "Lab", " padded"); }), ErrorCode::InvalidOption);
}

TEST(DeleteTagData, EmptiesColumn) {
  auto db = fixture_db();
  EXPECT_EQ(delete_tag_data(db, "StudyType"), db);
  auto tagged = assign_text(db, "ABCD1234", "StudyType", "Lab");
  tagged = assign_text(tagged, "EFGH5678", "StudyType", "Field");
  auto wiped = delete_tag_data(tagged, "StudyType");
  EXPECT_EQ(option_counts(wiped).find("StudyType")->count("(none)"), wiped.size());
  EXPECT_EQ(code_of([&] { delete_tag_data(db, "Nope"); }), ErrorCode::UnknownTag);

  // Composition: delete then conform without the tag drops zero cells.
  auto groups = db.schema().groups();
  groups[0].tags.erase(groups[0].tags.begin());
  auto out = conform(wiped, CategoriesSchema(groups));
  ASSERT_EQ(out.report.tags_removed.size(), 1u);
  EXPECT_EQ(out.report.tags_removed[0].dropped_cells, 0u);
  EXPECT_FALSE(out.db.tag_index("StudyType"));
}

}  // namespace
}  // namespace littag
