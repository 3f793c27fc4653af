#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "fixtures.hpp"
#include "vizcap/csv.hpp"
#include "vizcap/dataset.hpp"
#include "vizcap/error.hpp"

namespace vizcap {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIo;
}

TEST(LoadCsv, InfersNumericAndCategorical) {
  const auto t = LoadCsv("a,b\n1,x\n2,y");
  ASSERT_EQ(t->column_count(), 2u);
  EXPECT_EQ(t->row_count(), 2u);
  EXPECT_EQ(t->column("a").kind, ColumnKind::kNumeric);
  EXPECT_EQ(t->column("b").kind, ColumnKind::kCategorical);
}

TEST(LoadCsv, EmptyCellDoesNotForceCategorical) {
  const auto t = LoadCsv("a,b\n1,2\n3,");
  EXPECT_EQ(t->column("b").kind, ColumnKind::kNumeric);
  EXPECT_EQ(t->number(0, 1), 2.0);
  EXPECT_FALSE(t->number(1, 1).has_value());
}

TEST(LoadCsv, RaggedRowReportsRow) {
  try {
    LoadCsv("a\n1\n2\n3,4");
    FAIL() << "ragged row accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_EQ(e.location(), 3u);
  }
}

TEST(LoadCsv, HeaderOnlyIsEmptyDataset) {
  EXPECT_EQ(CodeOf([] { LoadCsv("a,b\n"); }), ErrorCode::kEmptyDataset);
}

TEST(LoadCsv, QuotedFieldsAndCrlf) {
  const auto t = LoadCsv("name,v\r\n\"Korea, Republic of\",1.5\r\n\"say \"\"hi\"\"\",2\r\n");
  EXPECT_EQ(t->cell(0, 0), "Korea, Republic of");
  EXPECT_EQ(t->cell(1, 0), "say \"hi\"");
  EXPECT_EQ(t->column("v").kind, ColumnKind::kNumeric);
}

TEST(LoadCsv, UnterminatedQuoteIsParseError) {
  EXPECT_EQ(CodeOf([] { LoadCsv("a\n\"open\n"); }), ErrorCode::kParse);
}

TEST(LoadCsv, InvalidUtf8IsParseError) {
  EXPECT_EQ(CodeOf([] { LoadCsv("a\n\xff\xfe\n"); }), ErrorCode::kParse);
}

TEST(LoadCsv, NoHeaderNamesColumns) {
  CsvOptions o;
  o.has_header = false;
  const auto t = LoadCsv("1,2\n3,4\n", o);
  EXPECT_EQ(t->row_count(), 2u);
  EXPECT_TRUE(t->find_column("col_0").has_value());
  EXPECT_TRUE(t->find_column("col_1").has_value());
}

TEST(LoadCsv, DuplicateHeaderRejected) {
  EXPECT_THROW(LoadCsv("a,a\n1,2\n"), Error);
}

TEST(LoadCsv, IntegralFlagTracksFractions) {
  const auto t = LoadCsv("a,b\n1,1.5\n2,2\n");
  EXPECT_TRUE(t->integral(0));
  EXPECT_FALSE(t->integral(1));
}

TEST(LoadCsv, RoundTripsThroughToCsv) {
  const std::string text = "name,v,w\n\"a,b\",1,\n\"q\"\"x\",2.25,z\nplain,3,y\n";
  const auto t = LoadCsv(text);
  const auto again = LoadCsv(ToCsv(*t));
  EXPECT_EQ(again->rows(), t->rows());
  ASSERT_EQ(again->column_count(), t->column_count());
  for (std::size_t c = 0; c < t->column_count(); ++c) {
    EXPECT_EQ(again->columns()[c].name, t->columns()[c].name);
    EXPECT_EQ(again->columns()[c].kind, t->columns()[c].kind);
  }
}

TEST(LoadCsv, TypingIgnoresRowOrder) {
  std::vector<std::string> rows = {"1,a,", "2,b,3", "x,c,4", "4,d,", "5.5,e,6"};
  std::mt19937 rng(3);
  std::vector<ColumnKind> first;
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(rows.begin(), rows.end(), rng);
    std::string text = "p,q,r\n";
    for (const auto& r : rows) text += r + "\n";
    const auto t = LoadCsv(text);
    std::vector<ColumnKind> kinds;
    for (const auto& c : t->columns()) kinds.push_back(c.kind);
    if (first.empty()) first = kinds;
    EXPECT_EQ(kinds, first);
  }
  EXPECT_EQ(first, (std::vector<ColumnKind>{ColumnKind::kCategorical, ColumnKind::kCategorical, ColumnKind::kNumeric}));
}

TEST(ParseNumber, AcceptsDecimalsOnly) {
  EXPECT_EQ(ParseNumber(" 1.684 "), 1.684);
  EXPECT_EQ(ParseNumber("-2e3"), -2000.0);
  EXPECT_FALSE(ParseNumber("").has_value());
  EXPECT_FALSE(ParseNumber("0x10").has_value());
  EXPECT_FALSE(ParseNumber("nan").has_value());
  EXPECT_FALSE(ParseNumber("inf").has_value());
  EXPECT_FALSE(ParseNumber("1,000").has_value());
}

TEST(SelectAxes, ValidSelection) {
  const auto t = LoadCsv("a,b,c\n1,2,x\n2,3,y\n3,5,z\n");
  const auto s = SelectAxes(t, "a", "b", std::string("c"));
  EXPECT_EQ(s.title, "a VS b");
  EXPECT_EQ(s.usable_rows, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(OtherColumns(s), (std::vector<std::string>{"c"}));
}

TEST(SelectAxes, SameAxisIsSelectionError) {
  const auto t = LoadCsv("a,b\n1,2\n2,3\n3,4\n");
  EXPECT_EQ(CodeOf([&] { SelectAxes(t, "a", "a"); }), ErrorCode::kSelection);
}

TEST(SelectAxes, CategoricalAxisIsTypeError) {
  const auto t = LoadCsv("a,b\nx,2\ny,3\nz,4\n");
  EXPECT_EQ(CodeOf([&] { SelectAxes(t, "a", "b"); }), ErrorCode::kType);
}

TEST(SelectAxes, UnknownColumnIsSelectionError) {
  const auto t = LoadCsv("a,b\n1,2\n2,3\n3,4\n");
  EXPECT_EQ(CodeOf([&] { SelectAxes(t, "a", "zz"); }), ErrorCode::kSelection);
}

TEST(SelectAxes, MissingCellsDropRowsButKeepTable) {
  const auto t = LoadCsv("a,b\n1,2\n,3\n3,\n4,5\n5,6\n");
  const auto s = SelectAxes(t, "a", "b");
  EXPECT_EQ(s.usable_rows, (std::vector<std::size_t>{0, 3, 4}));
  EXPECT_EQ(t->row_count(), 5u);
}

TEST(SelectAxes, TooFewUsableRows) {
  const auto t = LoadCsv("a,b\n1,2\n,3\n3,\n4,5\n");
  EXPECT_EQ(CodeOf([&] { SelectAxes(t, "a", "b"); }), ErrorCode::kInsufficientData);
}

TEST(ColumnRange, HappinessFixtureMatchesPrintedRange) {
  const auto t = LoadCsvFile(testing::FixturePath("happiness.csv"));
  const auto s = SelectAxes(t, "GDP per capita", "Healthy life expectancy");
  const auto x = ColumnRange(s, Axis::kX);
  EXPECT_EQ(x.min, 0.0);
  EXPECT_EQ(x.max, 1.684);
  EXPECT_FALSE(x.integral);
  const auto y = ColumnRange(s, Axis::kY);
  EXPECT_EQ(y.min, 0.0);
  EXPECT_EQ(y.max, 1.141);
}

TEST(ColumnRange, IntegerRangeAndDegenerateColumn) {
  const auto t = LoadCsv("area,items,k\n775,932,4\n2229,2667,4\n1500,1800,4\n");
  const auto s = SelectAxes(t, "area", "items");
  const auto r = ColumnRange(s, Axis::kX);
  EXPECT_EQ(r.min, 775);
  EXPECT_EQ(r.max, 2229);
  EXPECT_TRUE(r.integral);
  const auto flat = ColumnRange(SelectAxes(t, "area", "k"), Axis::kY);
  EXPECT_EQ(flat.min, 4);
  EXPECT_EQ(flat.max, 4);
}

TEST(ColumnRange, BoundsEveryUsableValue) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50, 50);
  std::string text = "x,y\n";
  for (int i = 0; i < 200; ++i) text += std::to_string(u(rng)) + "," + std::to_string(u(rng)) + "\n";
  const auto s = SelectAxes(LoadCsv(text), "x", "y");
  const auto r = ColumnRange(s, Axis::kX);
  for (const auto row : s.usable_rows) {
    const double v = *s.table->number(row, 0);
    EXPECT_LE(r.min, v);
    EXPECT_GE(r.max, v);
  }
}

TEST(OtherColumns, FileOrder) {
  const auto t = LoadCsvFile(testing::FixturePath("happiness.csv"));
  const auto s = SelectAxes(t, "GDP per capita", "Healthy life expectancy");
  EXPECT_EQ(OtherColumns(s), (std::vector<std::string>{"Social support", "Perceptions of corruption", "Generosity",
                                                       "Overall rank", "Score", "Country or region",
                                                       "Freedom to make life choices"}));
}

TEST(CollectPoints, LabelsFallBackToRowNumber) {
  const auto t = LoadCsv("a,b,n\n1,2,x\n2,3,y\n3,5,z\n");
  const auto with = CollectPoints(SelectAxes(t, "a", "b", std::string("n")));
  EXPECT_EQ(with.labels, (std::vector<std::string>{"x", "y", "z"}));
  const auto without = CollectPoints(SelectAxes(t, "a", "b"));
  EXPECT_EQ(without.labels[1], "row 1");
}

TEST(Csv, EscapeField) {
  EXPECT_EQ(csv::EscapeField("plain"), "plain");
  EXPECT_EQ(csv::EscapeField("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::EscapeField("q\"x"), "\"q\"\"x\"");
}

}  // namespace
}  // namespace vizcap
