#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "idsgan/data.hpp"
#include "idsgan/errors.hpp"

namespace idsgan::data {
namespace {

RawTable parse(const std::string& text, bool header = true) {
  std::istringstream in(text);
  return parse_csv(in, header);
}

TEST(Csv, HeaderAndRows) {
  const RawTable t = parse("a, b ,label\n1,2,x\n3,4,y\n");
  EXPECT_EQ(t.column_count(), 3u);
  EXPECT_EQ(t.row_count(), 2u);
  EXPECT_EQ(t.rows[1][2], "y");
  EXPECT_EQ(t.find_column("B"), 1u);
  EXPECT_EQ(t.find_column("LABEL"), 2u);
  EXPECT_FALSE(t.find_column("missing").has_value());
}

TEST(Csv, HeaderlessNamesColumns) {
  const RawTable t = parse("1,2,x\n3,4,y\n", false);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"c0", "c1", "c2"}));
  EXPECT_EQ(t.row_count(), 2u);
}

TEST(Csv, QuotedFields) {
  const RawTable t = parse("a,b\n\"1,5\",\"say \"\"hi\"\"\"\n");
  EXPECT_EQ(t.rows[0][0], "1,5");
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
}

TEST(Csv, CarriageReturnsTolerated) {
  const RawTable t = parse("a,b\r\n1,2\r\n");
  ASSERT_EQ(t.row_count(), 1u);
  EXPECT_EQ(trim(t.rows[0][1]), "2");
}

TEST(Csv, RaggedRowIsParseErrorNamingLine) {
  try {
    parse("a,b\n1,2\n3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(Csv, EmptyInputIsParseError) {
  EXPECT_THROW(parse(""), ParseError);
}

TEST(Csv, MissingFileIsIoError) {
  EXPECT_THROW(load_csv("/nonexistent/idsgan.csv", true), IoError);
}

TEST(Csv, FixturesLoad) {
  const RawTable kdd = load_csv(IDSGAN_TEST_DATA_DIR "/kdd_sample.csv", false);
  EXPECT_EQ(kdd.column_count(), 42u);
  EXPECT_EQ(kdd.row_count(), 297u);
  const RawTable cic = load_csv(IDSGAN_TEST_DATA_DIR "/cicids_sample.csv", true);
  EXPECT_EQ(cic.column_count(), 79u);
  EXPECT_EQ(cic.find_column("label"), 78u);
}

TEST(Csv, AppendRequiresMatchingHeaders) {
  RawTable a = parse("x,label\n1,a\n");
  append_rows(a, parse("x,label\n2,b\n"));
  EXPECT_EQ(a.row_count(), 2u);
  EXPECT_THROW(append_rows(a, parse("x,y,label\n1,2,a\n")), ParseError);
}

TEST(ParseNumber, Cases) {
  EXPECT_EQ(parse_number(" 2.5 "), 2.5);
  EXPECT_EQ(parse_number("-3"), -3.0);
  EXPECT_FALSE(parse_number("tcp").has_value());
  EXPECT_FALSE(parse_number("").has_value());
  EXPECT_FALSE(parse_number("1.5x").has_value());
}

TEST(Dedupe, KeepsFirstOccurrenceInOrder) {
  const RawTable t = parse("a,b\n1,x\n2,y\n1,x\n3,z\n2,y\n");
  const RawTable d = dedupe(t);
  ASSERT_EQ(d.row_count(), 3u);
  EXPECT_EQ(d.rows[0][0], "1");
  EXPECT_EQ(d.rows[1][0], "2");
  EXPECT_EQ(d.rows[2][0], "3");
}

TEST(Dedupe, IdempotentAndOrderPreservingOnRandomTables) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> cell(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    RawTable t;
    t.columns = {"a", "b"};
    const int rows = 1 + trial;
    for (int r = 0; r < rows; ++r) {
      t.rows.push_back({std::to_string(cell(rng)), std::to_string(cell(rng))});
    }
    const RawTable once = dedupe(t);
    EXPECT_EQ(dedupe(once).rows, once.rows);
    // The deduplicated rows appear in t as a subsequence, each row first seen at its position.
    std::size_t k = 0;
    for (std::size_t r = 0; r < t.rows.size() && k < once.rows.size(); ++r) {
      if (t.rows[r] == once.rows[k]) ++k;
    }
    EXPECT_EQ(k, once.rows.size());
    for (const auto& row : t.rows) {
      EXPECT_EQ(std::count(once.rows.begin(), once.rows.end(), row), 1);
    }
  }
}

}  // namespace
}  // namespace idsgan::data
