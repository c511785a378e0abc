#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "littag/error.hpp"
#include "littag/filter.hpp"

namespace littag {
namespace {

CompareExpr cmp(std::string column, CompareOp op, Literal::Kind kind, std::string text) {
  return {std::move(column), op, {kind, std::move(text)}};
}

TEST(FilterParse, AndOfCompareAndHas) {
  auto e = parse_filter(R"(StudyType == "Lab" & has(Region, "Arctic"))");
  EXPECT_EQ(e, FilterExpr(AndExpr{{cmp("StudyType", CompareOp::Eq, Literal::Kind::String, "Lab"),
                                   HasExpr{"Region", "Arctic"}}}));
}

TEST(FilterParse, OrOfNotEmptyAndQuotedColumn) {
  auto e = parse_filter("!empty(DOI) | `Publication Year` >= 2020");
  EXPECT_EQ(e, FilterExpr(OrExpr{{NotExpr{EmptyExpr{"DOI"}},
                                  cmp("Publication Year", CompareOp::Ge, Literal::Kind::Number, "2020")}}));
}

TEST(FilterParse, TruncatedInputReportsEnd) {
  std::string text = "StudyType == ";
  try {
    parse_filter(text);
    FAIL();
  } catch (const FilterParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.position(), text.size());
    EXPECT_EQ(e.expected(), (std::vector<std::string>{"string", "number", "date"}));
  }
}

TEST(FilterParse, ErrorPositions) {
  struct Case {
    const char* text;
    std::size_t position;
  };
  for (auto c : {Case{"(a == 1", 7}, Case{"a == 1 b", 7}, Case{"has(a \"x\")", 6}, Case{"foo(a)", 0},
                 Case{"a === 1", 4}, Case{"\"lit\" == a", 0}, Case{"a == \"open", 10}, Case{"", 0},
                 Case{"a == 2021-13-01", 5}}) {
    try {
      parse_filter(c.text);
      ADD_FAILURE() << c.text;
    } catch (const FilterParseError& e) {
      EXPECT_EQ(e.position(), c.position) << c.text;
      EXPECT_FALSE(e.expected().empty()) << c.text;
    }
  }
}

TEST(FilterParse, Precedence) {
  auto e = parse_filter("tagged(a) | tagged(b) & tagged(c)");
  EXPECT_EQ(e, FilterExpr(OrExpr{{TaggedExpr{"a"}, AndExpr{{TaggedExpr{"b"}, TaggedExpr{"c"}}}}}));
  auto n = parse_filter("!tagged(a) & tagged(b)");
  EXPECT_EQ(n, FilterExpr(AndExpr{{NotExpr{TaggedExpr{"a"}}, TaggedExpr{"b"}}}));
  EXPECT_EQ(parse_filter("tagged(a) && tagged(b) || tagged(c)"),
            parse_filter("(tagged(a) & tagged(b)) | tagged(c)"));
}

TEST(FilterParse, LiteralsAndEscapes) {
  auto e = parse_filter(R"(`odd \`name\`` != "say \"hi\"\n")");
  EXPECT_EQ(e, FilterExpr(cmp("odd `name`", CompareOp::Ne, Literal::Kind::String, "say \"hi\"\n")));
  EXPECT_EQ(parse_filter("d < 2021-03-04"), FilterExpr(cmp("d", CompareOp::Lt, Literal::Kind::Date, "2021-03-04")));
  EXPECT_EQ(parse_filter("n <= -3.5"), FilterExpr(cmp("n", CompareOp::Le, Literal::Kind::Number, "-3.5")));
}

TEST(FilterPrint, CanonicalForms) {
  EXPECT_EQ(print_filter(parse_filter("a==1&(b>2|c<3)")), "a == 1 & (b > 2 | c < 3)");
  EXPECT_EQ(print_filter(parse_filter("!(tagged(a)&tagged(b))")), "!(tagged(a) & tagged(b))");
  EXPECT_EQ(print_filter(parse_filter("`Publication Year` >= 2020")), "`Publication Year` >= 2020");
  EXPECT_EQ(quote_column("Region"), "Region");
  EXPECT_EQ(quote_column("Item Type"), "`Item Type`");
}

TEST(FilterPrint, RoundTripProperty) {
  testing::Rng rng(59);
  for (int iter = 0; iter < 300; ++iter) {
    auto schema = testing::random_schema(rng);
    auto db = testing::random_database(rng, schema, testing::random_export(rng, {.rows = 5}));
    auto e = testing::random_filter(rng, db);
    auto text = print_filter(e);
    ASSERT_EQ(parse_filter(text), e) << text;
    ASSERT_EQ(print_filter(parse_filter(text)), text);
  }
}

TEST(Filter, ReferencedColumns) {
  auto e = parse_filter("a == 1 | (has(b, \"x\") & !empty(a)) | tagged(`c d`)");
  EXPECT_EQ(referenced_columns(e), (std::vector<std::string>{"a", "b", "c d"}));
}

}  // namespace
}  // namespace littag
