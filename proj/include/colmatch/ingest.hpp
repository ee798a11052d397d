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
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace colmatch
{

using Cell = std::optional<std::string>;

struct RawColumn
{
    std::string name;
    std::vector<Cell> cells;

    bool operator==(const RawColumn&) const = default;
};

/// One release of a dataset: header plus data, every column holding exactly `row_count` cells.
struct Table
{
    std::string name;
    std::vector<RawColumn> columns;
    std::size_t row_count = 0;

    /// Exact name first, then trimmed case-insensitive match.
    [[nodiscard]] const RawColumn* find(std::string_view column_name) const;
    bool operator==(const Table&) const = default;
};

/// Finite values of one column of one release, with bookkeeping for what was dropped.
struct NumericColumn
{
    std::string name;
    std::string release;
    std::vector<double> values;
    std::size_t dropped_nulls = 0;
    std::size_t dropped_non_numeric = 0;
};

enum class ColumnKind
{
    numeric,
    non_numeric
};

inline constexpr double default_numeric_threshold = 0.99;

struct CsvOptions
{
    char delimiter = ',';
    /// Matched case-insensitively against the trimmed cell.
    std::set<std::string> null_tokens{"", "NA", "NULL"};
};

/// Trim, then fold ASCII case. Used for header uniqueness and null-token matching.
std::string normalize_name(std::string_view name);

/// Parses RFC-4180 style CSV text. `release` becomes the table name.
Table parse_table(std::string_view text, std::string release, const CsvOptions& options = {});

/// Reads and parses a CSV file; the table is named after the file stem.
Table load_table(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes a table as CSV, quoting where needed. Nulls are written as empty fields.
void write_table(const Table& table, std::ostream& out, char delimiter = ',');

/// Strict decimal parse (point separator only, optional sign, exponent allowed). Rejects non-finite.
std::optional<double> parse_number(std::string_view text);

ColumnKind infer_kind(const RawColumn& column, double threshold = default_numeric_threshold);

enum class KindCheck
{
    enforce,
    skip
};

NumericColumn to_numeric_column(
    const RawColumn& column,
    std::string release,
    KindCheck check = KindCheck::enforce,
    double threshold = default_numeric_threshold);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

}
