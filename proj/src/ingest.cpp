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
#include <colmatch/ingest.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <colmatch/error.hpp>

namespace colmatch
{
namespace
{

std::string_view trim(std::string_view text)
{
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!text.empty() && is_space(text.front()))
        text.remove_prefix(1);
    while (!text.empty() && is_space(text.back()))
        text.remove_suffix(1);
    return text;
}

struct Record
{
    std::vector<std::string> fields;
    bool blank = false;
};

std::vector<Record> split_records(std::string_view text, char delimiter)
{
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool line_has_content = false;

    const auto end_field = [&]
    {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    const auto end_record = [&]
    {
        end_field();
        current.blank = !line_has_content;
        records.push_back(std::move(current));
        current = Record{};
        line_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i)
    {
        const char c = text[i];
        if (in_quotes)
        {
            if (c == '"')
            {
                if (i + 1 < text.size() && text[i + 1] == '"')
                {
                    field.push_back('"');
                    ++i;
                }
                else
                {
                    in_quotes = false;
                }
            }
            else
            {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started)
        {
            in_quotes = true;
            field_started = true;
            line_has_content = true;
        }
        else if (c == delimiter)
        {
            line_has_content = true;
            end_field();
        }
        else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
        {
            // CRLF: the '\n' closes the record.
        }
        else if (c == '\n')
        {
            end_record();
        }
        else
        {
            field.push_back(c);
            field_started = true;
            line_has_content = true;
        }
    }
    if (in_quotes)
        throw ParseError("unterminated quoted field at end of input", records.empty() ? 0 : records.size());
    if (line_has_content || !field.empty())
        end_record();
    while (!records.empty() && records.back().blank)
        records.pop_back();
    return records;
}

bool is_null(std::string_view cell, const std::set<std::string>& folded_tokens)
{
    return folded_tokens.contains(normalize_name(cell));
}

}

const RawColumn* Table::find(std::string_view column_name) const
{
    if (const auto it = std::ranges::find(columns, column_name, &RawColumn::name); it != columns.end())
        return &*it;
    const auto wanted = normalize_name(column_name);
    const auto it = std::ranges::find_if(columns, [&](const RawColumn& c) { return normalize_name(c.name) == wanted; });
    return it == columns.end() ? nullptr : &*it;
}

std::string normalize_name(std::string_view name)
{
    std::string out{trim(name)};
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

Table parse_table(std::string_view text, std::string release, const CsvOptions& options)
{
    if (text.starts_with("\xEF\xBB\xBF"))
        text.remove_prefix(3);
    auto records = split_records(text, options.delimiter);
    if (records.empty())
        throw ParseError("missing header row");

    std::set<std::string> folded_tokens;
    for (const auto& token : options.null_tokens)
        folded_tokens.insert(normalize_name(token));

    Table table;
    table.name = std::move(release);
    std::unordered_set<std::string> seen;
    for (const auto& header : records.front().fields)
    {
        std::string name{trim(header)};
        if (name.empty())
            throw ParseError("empty column name in header");
        if (!seen.insert(normalize_name(name)).second)
            throw ParseError("duplicate column name '" + name + "' in header");
        table.columns.push_back(RawColumn{std::move(name), {}});
    }

    const std::size_t width = table.columns.size();
    for (std::size_t r = 1; r < records.size(); ++r)
    {
        auto& fields = records[r].fields;
        if (fields.size() != width)
        {
            throw ParseError(
                "row " + std::to_string(r) + " has " + std::to_string(fields.size()) + " cells, header has "
                    + std::to_string(width),
                r);
        }
        for (std::size_t c = 0; c < width; ++c)
        {
            if (is_null(fields[c], folded_tokens))
                table.columns[c].cells.emplace_back(std::nullopt);
            else
                table.columns[c].cells.emplace_back(std::move(fields[c]));
        }
    }
    table.row_count = records.size() - 1;
    return table;
}

Table load_table(const std::filesystem::path& path, const CsvOptions& options)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
        throw IoError("failed reading '" + path.string() + "'");
    return parse_table(buffer.str(), path.stem().string(), options);
}

void write_table(const Table& table, std::ostream& out, char delimiter)
{
    const auto write_field = [&](std::string_view value)
    {
        const bool needs_quotes = value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos
            || trim(value).size() != value.size();
        if (!needs_quotes)
        {
            out << value;
            return;
        }
        out << '"';
        for (const char c : value)
        {
            if (c == '"')
                out << '"';
            out << c;
        }
        out << '"';
    };

    for (std::size_t c = 0; c < table.columns.size(); ++c)
    {
        if (c > 0)
            out << delimiter;
        write_field(table.columns[c].name);
    }
    out << '\n';
    for (std::size_t r = 0; r < table.row_count; ++r)
    {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
        {
            if (c > 0)
                out << delimiter;
            if (const auto& cell = table.columns[c].cells[r])
                write_field(*cell);
        }
        out << '\n';
    }
}

std::optional<double> parse_number(std::string_view text)
{
    text = trim(text);
    if (text.starts_with('+'))
        text.remove_prefix(1);
    if (text.empty())
        return std::nullopt;
    // from_chars would accept "inf"/"nan"; only digits, sign, point and exponent are valid here.
    const bool plain = std::ranges::all_of(
        text,
        [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == 'e' || c == 'E' || c == '+'; });
    if (!plain)
        return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::general);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

ColumnKind infer_kind(const RawColumn& column, double threshold)
{
    std::size_t non_null = 0;
    std::size_t numeric = 0;
    for (const auto& cell : column.cells)
    {
        if (!cell)
            continue;
        ++non_null;
        if (parse_number(*cell))
            ++numeric;
    }
    if (non_null == 0)
        return ColumnKind::non_numeric;
    return static_cast<double>(numeric) >= threshold * static_cast<double>(non_null) ? ColumnKind::numeric
                                                                                      : ColumnKind::non_numeric;
}

NumericColumn to_numeric_column(const RawColumn& column, std::string release, KindCheck check, double threshold)
{
    if (check == KindCheck::enforce && infer_kind(column, threshold) != ColumnKind::numeric)
        throw KindError("column '" + column.name + "' is not numeric");

    NumericColumn out{column.name, std::move(release), {}, 0, 0};
    out.values.reserve(column.cells.size());
    for (const auto& cell : column.cells)
    {
        if (!cell)
        {
            ++out.dropped_nulls;
            continue;
        }
        if (const auto value = parse_number(*cell))
            out.values.push_back(*value);
        else
            ++out.dropped_non_numeric;
    }
    return out;
}

std::string format_double(double value)
{
    char buffer[32];
    const int written = std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return std::string(buffer, static_cast<std::size_t>(written));
}

}
