/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <colmatch/error.hpp>
#include <colmatch/ingest.hpp>

#include "support.hpp"

namespace colmatch
{
namespace
{

TEST(IngestTest, ParsesRowsAndNulls)
{
    const auto t = parse_table("a,b\n1,2\n3,\n", "r1");
    EXPECT_EQ(t.name, "r1");
    EXPECT_EQ(t.row_count, 2u);
    ASSERT_EQ(t.columns.size(), 2u);
    EXPECT_EQ(t.columns[0].cells, (std::vector<Cell>{"1", "3"}));
    EXPECT_EQ(t.columns[1].cells, (std::vector<Cell>{"2", std::nullopt}));
}

TEST(IngestTest, DuplicateHeaderAfterNormalization)
{
    EXPECT_THROW(parse_table("a,a\n1,2\n", "r"), ParseError);
    EXPECT_THROW(parse_table("Name, name \n1,2\n", "r"), ParseError);
}

TEST(IngestTest, RaggedRowNamesTheRow)
{
    try
    {
        parse_table("a,b\n1,2\n1\n", "r");
        FAIL() << "expected a parse error";
    }
    catch (const ParseError& e)
    {
        EXPECT_EQ(e.row(), 2u);
        EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
    }
}

TEST(IngestTest, QuotesCrlfAndBom)
{
    const auto t = parse_table("\xEF\xBB\xBFx,\"y,z\"\r\n\"a \"\"q\"\"\",\"line\nbreak\"\r\n", "r");
    ASSERT_EQ(t.columns.size(), 2u);
    EXPECT_EQ(t.columns[0].name, "x");
    EXPECT_EQ(t.columns[1].name, "y,z");
    EXPECT_EQ(t.columns[0].cells[0], Cell("a \"q\""));
    EXPECT_EQ(t.columns[1].cells[0], Cell("line\nbreak"));
}

TEST(IngestTest, OriginalHeaderSpellingPreserved)
{
    const auto t = parse_table(" Num_Salas ,b\n1,2\n", "r");
    EXPECT_EQ(t.columns[0].name, "Num_Salas");
    EXPECT_NE(t.find("num_salas"), nullptr);
}

TEST(IngestTest, CustomDelimiterAndNullTokens)
{
    CsvOptions options;
    options.delimiter = ';';
    options.null_tokens = {"-"};
    const auto t = parse_table("a;b\n-;NA\n", "r", options);
    EXPECT_EQ(t.columns[0].cells[0], std::nullopt);
    EXPECT_EQ(t.columns[1].cells[0], Cell("NA"));
}

TEST(IngestTest, DefaultNullTokensAreCaseInsensitive)
{
    const auto t = parse_table("a\nna\nNull\n7\n", "r");
    EXPECT_EQ(t.columns[0].cells[0], std::nullopt);
    EXPECT_EQ(t.columns[0].cells[1], std::nullopt);
}

TEST(IngestTest, LoadTableNamesAfterStemAndReportsMissingFiles)
{
    const auto dir = testing::scratch_dir("ingest");
    {
        std::ofstream out(dir / "2019.csv");
        out << "a\n1\n";
    }
    EXPECT_EQ(load_table(dir / "2019.csv").name, "2019");
    EXPECT_THROW(load_table(dir / "missing.csv"), IoError);
    std::filesystem::remove_all(dir);
}

TEST(IngestTest, InferKind)
{
    EXPECT_EQ(infer_kind(RawColumn{"c", {"1", "2", "3"}}), ColumnKind::numeric);
    EXPECT_EQ(infer_kind(RawColumn{"c", {"a", "b"}}), ColumnKind::non_numeric);
    EXPECT_EQ(infer_kind(RawColumn{"c", {"1", "2", std::nullopt, "x"}}, 0.99), ColumnKind::non_numeric);
    EXPECT_EQ(infer_kind(RawColumn{"c", {"1", "2", std::nullopt, "x"}}, 0.6), ColumnKind::numeric);
}

TEST(IngestTest, ToNumericColumn)
{
    const auto a = to_numeric_column(RawColumn{"c", {"1", "2", std::nullopt}}, "r");
    EXPECT_EQ(a.values, (std::vector<double>{1, 2}));
    EXPECT_EQ(a.dropped_nulls, 1u);
    EXPECT_EQ(to_numeric_column(RawColumn{"c", {"1.5", "-2"}}, "r").values, (std::vector<double>{1.5, -2}));
    const auto forced = to_numeric_column(RawColumn{"c", {"1", "oops", "3"}}, "r", KindCheck::skip);
    EXPECT_EQ(forced.values, (std::vector<double>{1, 3}));
    EXPECT_EQ(forced.dropped_non_numeric, 1u);
    EXPECT_THROW(to_numeric_column(RawColumn{"c", {"a", "b"}}, "r"), KindError);
}

TEST(IngestTest, StrictNumberParsing)
{
    EXPECT_EQ(parse_number("  +3.5e2 "), 350.0);
    EXPECT_EQ(parse_number("-0.25"), -0.25);
    EXPECT_FALSE(parse_number("1,5"));
    EXPECT_FALSE(parse_number("inf"));
    EXPECT_FALSE(parse_number("nan"));
    EXPECT_FALSE(parse_number("1e999"));
    EXPECT_FALSE(parse_number("12abc"));
    EXPECT_FALSE(parse_number(""));
}

TEST(IngestTest, FormatDoubleRoundTrips)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i)
    {
        const double v = dist(rng);
        EXPECT_EQ(*parse_number(format_double(v)), v);
    }
}

// Property: values plus drops account for every row, for every column.
TEST(IngestTest, DropAccountingCoversEveryRow)
{
    std::mt19937_64 rng(10);
    const std::vector<std::string> pool{"1", "2.5", "", "NA", "x", "-4", "1e3", "NULL", "?"};
    for (int trial = 0; trial < 50; ++trial)
    {
        std::ostringstream csv;
        csv << "a,b,c\n";
        const int rows = 1 + static_cast<int>(rng() % 30);
        for (int r = 0; r < rows; ++r)
            csv << pool[rng() % pool.size()] << ',' << pool[rng() % pool.size()] << ',' << pool[rng() % pool.size()] << '\n';
        const auto t = parse_table(csv.str(), "r");
        for (const auto& c : t.columns)
        {
            const auto n = to_numeric_column(c, "r", KindCheck::skip);
            EXPECT_EQ(n.values.size() + n.dropped_nulls + n.dropped_non_numeric, t.row_count);
        }
    }
}

// Property: write then parse gives back the same table.
TEST(IngestTest, WriteParseRoundTrip)
{
    std::mt19937_64 rng(11);
    const std::vector<Cell> pool{"1", "a,b", "say \"hi\"", std::nullopt, "line\nbreak", " pad ", "3.25"};
    for (int trial = 0; trial < 30; ++trial)
    {
        Table t;
        t.name = "r";
        t.row_count = 1 + rng() % 10;
        for (const auto* name : {"x", "y", "z"})
        {
            RawColumn c{name, {}};
            for (std::size_t r = 0; r < t.row_count; ++r)
                c.cells.push_back(pool[rng() % pool.size()]);
            t.columns.push_back(std::move(c));
        }
        std::ostringstream out;
        write_table(t, out);
        EXPECT_EQ(parse_table(out.str(), "r"), t);
    }
}

TEST(IngestTest, DeterministicParse)
{
    const std::string text = "a,b\n1,2\n3,4\n";
    EXPECT_EQ(parse_table(text, "r"), parse_table(text, "r"));
}

}
}
