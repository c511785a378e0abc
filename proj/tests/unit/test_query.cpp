#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "littag/csv.hpp"
#include "littag/error.hpp"
#include "littag/query.hpp"
#include "littag/tagging.hpp"
#include "oracle.hpp"

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

TagDatabase tagged_fixture() {
  auto db = create_database(testing::fixture_export(), testing::methods_schema());
  db = assign_text(db, "ABCD1234", "StudyType", "Lab");
  db = assign_text(db, "ABCD1234", "Region", "Arctic; Pacific");
  db = assign_text(db, "EFGH5678", "StudyType", "Lab");
  db = assign_text(db, "EFGH5678", "Region", "Arctic");
  db = assign_text(db, "EFGH5678", "PubDate", "2021-06-01");
  return db;
}

std::vector<std::string> keys(const TagDatabase& db, const std::string& filter) {
  return eval_filter(db, parse_filter(filter));
}

TEST(Eval, TaggedMatchesRowScan) {
  auto db = tagged_fixture();
  EXPECT_EQ(keys(db, "tagged(StudyType)"), (std::vector<std::string>{"ABCD1234", "EFGH5678"}));
  EXPECT_EQ(keys(db, "tagged(StudyType)"), testing::oracle_filter(testing::plain_table(db), parse_filter("tagged(StudyType)")));
  EXPECT_EQ(keys(db, "!empty(Key)").size(), 3u);
}

TEST(Eval, Semantics) {
  auto db = tagged_fixture();
  EXPECT_EQ(keys(db, "has(Region, \"Pacific\")"), (std::vector<std::string>{"ABCD1234"}));
  EXPECT_EQ(keys(db, "has(StudyType, \"Lab\")").size(), 2u);
  EXPECT_EQ(keys(db, "Region == \"Arctic\""), (std::vector<std::string>{"EFGH5678"}));
  EXPECT_EQ(keys(db, "`Publication Year` >= 2019"), (std::vector<std::string>{"ABCD1234", "EFGH5678"}));
  EXPECT_EQ(keys(db, "`Publication Year` == 2016.0"), (std::vector<std::string>{"IJKL9012"}));
  EXPECT_EQ(keys(db, "`Publication Year` == \"2016.0\""), (std::vector<std::string>{}));
  EXPECT_EQ(keys(db, "PubDate < 2022-01-01"), (std::vector<std::string>{"EFGH5678"}));
  // Empty cells fail every comparison, including !=.
  EXPECT_EQ(keys(db, "PubDate != 2022-01-01"), (std::vector<std::string>{"EFGH5678"}));
  EXPECT_EQ(keys(db, "contains(Title, \"COPEPOD\")"), (std::vector<std::string>{"EFGH5678"}));
  EXPECT_EQ(keys(db, "contains(DOI, \"\")"), (std::vector<std::string>{"ABCD1234", "EFGH5678"}));
  EXPECT_EQ(keys(db, "empty(DOI) | StudyType == \"Lab\" & !has(Region, \"Pacific\")"),
            (std::vector<std::string>{"EFGH5678", "IJKL9012"}));
}

TEST(Eval, UnknownColumnAtBindTime) {
  auto db = tagged_fixture();
  auto e = parse_filter("tagged(Nope)");
  try {
    eval_filter(db, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::UnknownColumn);
    EXPECT_EQ(err.detail(), "Nope");
  }
}

TEST(Eval, RandomAstsAgainstOracle) {
  testing::Rng rng(61);
  for (int iter = 0; iter < 300; ++iter) {
    auto schema = testing::random_schema(rng);
    auto db = testing::random_database(rng, schema, testing::random_export(rng, {.rows = testing::uniform(rng, 0, 25)}));
    auto table = testing::plain_table(db);
    for (int f = 0; f < 5; ++f) {
      auto e = testing::random_filter(rng, db);
      ASSERT_EQ(eval_filter(db, e), testing::oracle_filter(table, e)) << print_filter(e);
    }
  }
}

TEST(Crosstab, PairCounting) {
  auto t = crosstab(tagged_fixture(), "StudyType", "Region");
  EXPECT_EQ(t.row_labels, (std::vector<std::string>{"Field", "Lab", "Model", "(none)"}));
  EXPECT_EQ(t.col_labels, (std::vector<std::string>{"Arctic", "Atlantic", "Pacific", "(none)"}));
  EXPECT_EQ(t.at("Lab", "Arctic"), 2u);
  EXPECT_EQ(t.at("Lab", "Pacific"), 1u);
  EXPECT_EQ(t.at("(none)", "(none)"), 1u);
  for (const auto& c : t.col_labels) {
    EXPECT_EQ(t.at("Field", c), 0u);
    EXPECT_EQ(t.at("Model", c), 0u);
  }
  EXPECT_EQ(t.filtered_rows, 3u);

  auto filtered = crosstab(tagged_fixture(), "StudyType", "Region", parse_filter("tagged(StudyType)"));
  EXPECT_EQ(filtered.at("(none)", "(none)"), 0u);
  EXPECT_EQ(filtered.filtered_rows, 2u);
}

TEST(Crosstab, EmptyFilterResult) {
  auto t = crosstab(tagged_fixture(), "StudyType", "Region", parse_filter("StudyType == \"Model\""));
  EXPECT_EQ(t.filtered_rows, 0u);
  EXPECT_EQ(t.total(), 0u);
}

TEST(Crosstab, Errors) {
  auto db = tagged_fixture();
  EXPECT_EQ(code_of([&] { crosstab(db, "StudyType", "Summary"); }), ErrorCode::KindNotTabulable);
  EXPECT_EQ(code_of([&] { crosstab(db, "PubDate", "Region"); }), ErrorCode::KindNotTabulable);
  EXPECT_EQ(code_of([&] { crosstab(db, "Nope", "Region"); }), ErrorCode::UnknownTag);
}

TEST(Crosstab, ConservationAndOracle) {
  testing::Rng rng(67);
  int checked = 0;
  for (int iter = 0; iter < 200; ++iter) {
    auto schema = testing::random_schema(rng, {.min_tags = 2});
    auto db = testing::random_database(rng, schema, testing::random_export(rng, {.rows = testing::uniform(rng, 0, 30)}));
    std::vector<const TagDefinition*> sel;
    for (const auto& t : db.tag_columns()) {
      if (is_selection(t.kind)) sel.push_back(&t);
    }
    if (sel.size() < 2) continue;
    const auto* a = testing::pick(rng, sel);
    const auto* b = testing::pick(rng, sel);
    std::optional<FilterExpr> filter;
    if (testing::chance(rng, 0.5)) filter = testing::random_filter(rng, db, 2);
    auto t = crosstab(db, a->name, b->name, filter);
    auto table = testing::plain_table(db);
    auto rows = filter ? testing::oracle_filter(table, *filter) : testing::oracle_filter(table, parse_filter("!empty(Key)"));
    EXPECT_EQ(t.filtered_rows, rows.size());
    auto oracle = testing::oracle_crosstab(table, a->name, b->name, rows);
    for (const auto& r : t.row_labels) {
      for (const auto& c : t.col_labels) {
        auto it = oracle.find(r);
        std::size_t expect = it == oracle.end() || !it->second.count(c) ? 0 : it->second.at(c);
        ASSERT_EQ(t.at(r, c), expect) << a->name << " x " << b->name << " " << r << "/" << c;
      }
    }
    if (a->kind == TagKind::Single && b->kind == TagKind::Single) EXPECT_EQ(t.total(), rows.size());
    // Row marginals against option_counts when the column tag is single.
    if (b->kind == TagKind::Single) {
      auto counts = option_counts(db, rows);
      for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
        std::size_t sum = 0;
        for (auto n : t.counts[r]) sum += n;
        EXPECT_EQ(sum, counts.find(a->name)->count(t.row_labels[r]));
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(ExportTable, Projection) {
  auto db = tagged_fixture();
  auto rows = csv::parse(export_table(db, {"Title", "StudyType"}));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (csv::Row{"Key", "Title", "StudyType"}));
  for (std::size_t r = 0; r < db.size(); ++r) {
    EXPECT_EQ(rows[r + 1][0], db.rows()[r].key);
    EXPECT_EQ(rows[r + 1][1], db.rows()[r].citation_value("Title"));
    EXPECT_EQ(rows[r + 1][2], db.cell_text(db.rows()[r], "StudyType"));
  }
  EXPECT_EQ(csv::parse(export_table(db, {"Title"}, parse_filter("StudyType == \"Model\""))).size(), 1u);
  EXPECT_EQ(export_table(db, {}, parse_filter("has(Region, \"Pacific\")")), "Key\r\nABCD1234\r\n");
  EXPECT_EQ(csv::parse(export_table(db, {"Key", "Region"}))[0], (csv::Row{"Key", "Region"}));
  EXPECT_EQ(code_of([&] { export_table(db, {"Nope"}); }), ErrorCode::UnknownColumn);
}

}  // namespace
}  // namespace littag
