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
#include <colmatch/evalbench.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <colmatch/error.hpp>

namespace colmatch
{
namespace
{

ChangeKind parse_change_kind(std::string_view text, std::size_t line)
{
    const auto folded = normalize_name(text);
    if (folded == "same")
        return ChangeKind::same;
    if (folded == "renamed")
        return ChangeKind::renamed;
    if (folded == "added")
        return ChangeKind::added;
    if (folded == "removed")
        return ChangeKind::removed;
    throw ValidationError("line " + std::to_string(line) + ": unknown change '" + std::string(text) + "'");
}

void validate_entry(const TruthEntry& e, const std::string& where)
{
    switch (e.change)
    {
        case ChangeKind::added:
            if (e.base_column || !e.new_column)
                throw ValidationError(where + ": 'added' needs an empty base column and a new column");
            return;
        case ChangeKind::removed:
            if (!e.base_column || e.new_column)
                throw ValidationError(where + ": 'removed' needs a base column and an empty new column");
            return;
        case ChangeKind::same:
        case ChangeKind::renamed:
            if (!e.base_column || !e.new_column)
                throw ValidationError(where + ": '" + std::string(to_string(e.change)) + "' needs both columns");
            if ((e.change == ChangeKind::renamed) != (*e.base_column != *e.new_column))
                throw ValidationError(where + ": 'renamed' must be used exactly when the names differ");
            return;
    }
}

void validate_entries(const std::vector<TruthEntry>& entries, const std::vector<std::size_t>& lines)
{
    std::set<std::string> bases;
    std::set<std::string> news;
    for (std::size_t i = 0; i < entries.size(); ++i)
    {
        const std::string where = lines.empty() ? "entry " + std::to_string(i + 1) : "line " + std::to_string(lines[i]);
        const auto& e = entries[i];
        validate_entry(e, where);
        if (e.base_column && !bases.insert(*e.base_column).second)
            throw ValidationError(where + ": base column '" + *e.base_column + "' is mapped twice");
        if (e.new_column && !news.insert(*e.new_column).second)
            throw ValidationError(where + ": new column '" + *e.new_column + "' is mapped twice");
    }
}

std::optional<std::string> trimmed(const std::optional<std::string>& cell)
{
    if (!cell)
        return std::nullopt;
    const auto first = cell->find_first_not_of(" \t");
    if (first == std::string::npos)
        return std::nullopt;
    const auto last = cell->find_last_not_of(" \t");
    return cell->substr(first, last - first + 1);
}

bool is_integer_label(std::string_view s)
{
    return !s.empty() && s.size() < 18 && std::ranges::all_of(s, [](char c) { return c >= '0' && c <= '9'; });
}

bool release_before(const std::string& a, const std::string& b)
{
    if (is_integer_label(a) && is_integer_label(b))
        return std::stoll(a) < std::stoll(b);
    return a < b;
}

std::string format_fixed3(double v)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3f", v);
    return buffer;
}

std::string_view test_heading(TestKind kind)
{
    switch (kind)
    {
        case TestKind::ks:
            return "K-S Test";
        case TestKind::ad:
            return "A-D Test";
        case TestKind::welch:
            return "Welch's Test";
        case TestKind::f:
            return "F-Test";
    }
    return "";
}

struct ReleaseColumns
{
    std::vector<NumericColumn> numeric;
    std::vector<std::string> unscored;

    [[nodiscard]] const NumericColumn* find(std::string_view name) const
    {
        const auto it = std::ranges::find(numeric, name, &NumericColumn::name);
        return it == numeric.end() ? nullptr : &*it;
    }
};

ReleaseColumns split_columns(const Table& table, double threshold)
{
    ReleaseColumns out;
    for (const auto& c : table.columns)
    {
        if (infer_kind(c, threshold) == ColumnKind::numeric)
            out.numeric.push_back(to_numeric_column(c, table.name, KindCheck::skip));
        else
            out.unscored.push_back(c.name);
    }
    return out;
}

const GroundTruth& find_truth(std::span<const GroundTruth> truths, const std::string& from, const std::string& to)
{
    for (const auto& t : truths)
        if (t.release_from == from && t.release_to == to)
            return t;
    throw ValidationError("no ground truth for releases " + from + " -> " + to);
}

std::vector<EvalRow> run_mode(
    std::span<const Table> releases, std::span<const GroundTruth> truths, const EvalConfig& config, bool accumulated)
{
    config.match.validate();
    if (config.tests.empty())
        throw ValidationError("no tests configured");
    if (releases.empty())
        throw ValidationError("no releases to evaluate");

    std::vector<const GroundTruth*> chain;
    for (std::size_t n = 1; n < releases.size(); ++n)
        chain.push_back(&find_truth(truths, releases[n - 1].name, releases[n].name));

    std::vector<ReleaseColumns> columns;
    columns.reserve(releases.size());
    for (const auto& table : releases)
        columns.push_back(split_columns(table, config.numeric_threshold));

    std::vector<EvalRow> rows;
    rows.push_back(EvalRow{releases.front().name, std::nullopt, {}, {}, {}, 0, {}});

    for (std::size_t n = 1; n < releases.size(); ++n)
    {
        const auto& truth = *chain[n - 1];
        std::vector<PreparedColumn> base;
        for (const auto& column : columns[n - 1].numeric)
        {
            if (!accumulated)
            {
                base.push_back(prepare_column(column, config.match.outlier_factor));
                continue;
            }
            std::vector<NumericColumn> history{column};
            std::string name = column.name;
            for (std::size_t y = n - 1; y > 0; --y)
            {
                const auto* entry = chain[y - 1]->for_new(name);
                if (entry == nullptr || !entry->base_column)
                    break;
                name = *entry->base_column;
                const auto* earlier = columns[y - 1].find(name);
                if (earlier == nullptr)
                    break;
                history.push_back(*earlier);
            }
            std::ranges::reverse(history);
            base.push_back(prepare_history(column.name, history, config.match.outlier_factor));
        }
        std::vector<PreparedColumn> news;
        for (const auto& column : columns[n].numeric)
            news.push_back(prepare_column(column, config.match.outlier_factor));

        EvalRow row;
        row.release = releases[n].name;
        row.changes = truth.counts();
        for (const auto& u : columns[n - 1].unscored)
            row.unscored.push_back("base:" + u);
        for (const auto& u : columns[n].unscored)
            row.unscored.push_back("new:" + u);

        for (const auto test : config.tests)
        {
            auto match_config = config.match;
            match_config.test = test;
            const auto report = column_match_prepared(base, news, match_config);
            const auto top1 = topk_score(report.candidates, truth, 1, match_config.p_thresh);
            const auto topk = topk_score(report.candidates, truth, match_config.top_k, match_config.p_thresh);
            row.top1[test] = top1.scored > 0 ? std::optional(top1.accuracy()) : std::nullopt;
            row.topk[test] = topk.scored > 0 ? std::optional(topk.accuracy()) : std::nullopt;
            row.detected[test] = classify_changes(report);
            row.scored_columns = std::max(row.scored_columns, top1.scored);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double draw(const ColumnSpec& column, std::mt19937_64& rng)
{
    const auto& p = column.params;
    switch (column.family)
    {
        case Family::uniform:
            return std::uniform_real_distribution<double>(p[0], p[1])(rng);
        case Family::normal:
            return std::normal_distribution<double>(p[0], p[1])(rng);
        case Family::lognormal:
            return std::lognormal_distribution<double>(p[0], p[1])(rng);
        case Family::poisson:
            return static_cast<double>(std::poisson_distribution<long long>(p[0])(rng));
    }
    return 0.0;
}

void validate_column_spec(const ColumnSpec& c)
{
    if (c.name.empty())
        throw ValidationError("column spec without a name");
    const std::size_t wanted = c.family == Family::poisson ? 1 : 2;
    if (c.params.size() != wanted)
        throw ValidationError("column '" + c.name + "': expected " + std::to_string(wanted) + " parameters");
    const bool ok = [&]
    {
        switch (c.family)
        {
            case Family::uniform:
                return c.params[0] < c.params[1];
            case Family::normal:
            case Family::lognormal:
                return c.params[1] > 0.0;
            case Family::poisson:
                return c.params[0] > 0.0;
        }
        return false;
    }();
    if (!ok)
        throw ValidationError("column '" + c.name + "': invalid distribution parameters");
}

Family parse_family(const std::string& text)
{
    if (text == "uniform")
        return Family::uniform;
    if (text == "normal")
        return Family::normal;
    if (text == "lognormal")
        return Family::lognormal;
    if (text == "poisson")
        return Family::poisson;
    throw ValidationError("unknown distribution family '" + text + "'");
}

MutationOp parse_op(const std::string& text)
{
    if (text == "rename")
        return MutationOp::rename;
    if (text == "add")
        return MutationOp::add;
    if (text == "remove")
        return MutationOp::remove;
    if (text == "drift")
        return MutationOp::drift;
    throw ValidationError("unknown mutation '" + text + "'");
}

ColumnSpec column_spec_from_json(const nlohmann::json& doc)
{
    return ColumnSpec{
        doc.at("name").get<std::string>(),
        parse_family(doc.at("family").get<std::string>()),
        doc.at("params").get<std::vector<double>>()};
}

struct LiveColumn
{
    ColumnSpec spec;
    std::vector<double> draws;
    double offset = 0.0;
};

}

std::string_view to_string(ChangeKind kind)
{
    switch (kind)
    {
        case ChangeKind::same:
            return "same";
        case ChangeKind::renamed:
            return "renamed";
        case ChangeKind::added:
            return "added";
        case ChangeKind::removed:
            return "removed";
    }
    return "same";
}

void GroundTruth::validate() const
{
    validate_entries(entries, {});
}

ChangeCounts GroundTruth::counts() const
{
    ChangeCounts c;
    for (const auto& e : entries)
    {
        if (e.change == ChangeKind::renamed)
            ++c.changed;
        else if (e.change == ChangeKind::added)
            ++c.added;
        else if (e.change == ChangeKind::removed)
            ++c.removed;
    }
    return c;
}

const TruthEntry* GroundTruth::for_base(std::string_view base) const
{
    const auto it = std::ranges::find_if(entries, [&](const TruthEntry& e) { return e.base_column == base; });
    return it == entries.end() ? nullptr : &*it;
}

const TruthEntry* GroundTruth::for_new(std::string_view name) const
{
    const auto it = std::ranges::find_if(entries, [&](const TruthEntry& e) { return e.new_column == name; });
    return it == entries.end() ? nullptr : &*it;
}

GroundTruth parse_ground_truth(std::string_view text, std::string release_from, std::string release_to)
{
    // Strip comment lines but remember where each kept line came from.
    std::string kept;
    std::vector<std::size_t> line_of_record;
    std::size_t line_number = 0;
    std::size_t start = 0;
    while (start <= text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        auto line = text.substr(start, end - start);
        ++line_number;
        start = end + 1;
        if (line.ends_with('\r'))
            line.remove_suffix(1);
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string_view::npos && line[first] == '#')
            continue;
        if (first == std::string_view::npos && end == text.size())
            continue;
        kept.append(line);
        kept.push_back('\n');
        line_of_record.push_back(line_number);
        if (end == text.size())
            break;
    }

    Table table;
    try
    {
        table = parse_table(kept, "ground_truth", CsvOptions{',', {""}});
    }
    catch (const ParseError& e)
    {
        const auto line = e.row() < line_of_record.size() ? line_of_record[e.row()] : 0;
        throw ValidationError("ground truth line " + std::to_string(line) + ": " + e.what());
    }
    const bool header_ok = table.columns.size() == 3 && normalize_name(table.columns[0].name) == "base_column"
        && normalize_name(table.columns[1].name) == "new_column" && normalize_name(table.columns[2].name) == "change";
    if (!header_ok)
        throw ValidationError("ground truth header must be 'base_column,new_column,change'");

    GroundTruth truth{std::move(release_from), std::move(release_to), {}};
    std::vector<std::size_t> lines;
    for (std::size_t r = 0; r < table.row_count; ++r)
    {
        const std::size_t line = r + 1 < line_of_record.size() ? line_of_record[r + 1] : r + 2;
        const auto& change = table.columns[2].cells[r];
        if (!change)
            throw ValidationError("line " + std::to_string(line) + ": missing change label");
        TruthEntry entry;
        entry.base_column = trimmed(table.columns[0].cells[r]);
        entry.new_column = trimmed(table.columns[1].cells[r]);
        entry.change = parse_change_kind(*change, line);
        truth.entries.push_back(std::move(entry));
        lines.push_back(line);
    }
    validate_entries(truth.entries, lines);
    return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& path, std::string release_from, std::string release_to)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open ground truth '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (release_from.empty() && release_to.empty())
    {
        const auto stem = path.stem().string();
        if (const auto dash = stem.find('-'); dash != std::string::npos)
        {
            release_from = stem.substr(0, dash);
            release_to = stem.substr(dash + 1);
        }
    }
    return parse_ground_truth(buffer.str(), std::move(release_from), std::move(release_to));
}

void write_ground_truth(const GroundTruth& truth, std::ostream& out)
{
    Table table;
    table.columns = {RawColumn{"base_column", {}}, RawColumn{"new_column", {}}, RawColumn{"change", {}}};
    for (const auto& e : truth.entries)
    {
        table.columns[0].cells.push_back(e.base_column);
        table.columns[1].cells.push_back(e.new_column);
        table.columns[2].cells.emplace_back(std::string(to_string(e.change)));
    }
    table.row_count = truth.entries.size();
    write_table(table, out);
}

std::string ground_truth_file_name(std::string_view from, std::string_view to)
{
    return std::string(from) + "-" + std::string(to) + ".csv";
}

double TopkScore::accuracy() const
{
    if (scored == 0)
        throw DomainError("no scored base columns");
    return static_cast<double>(hits) / static_cast<double>(scored);
}

TopkScore topk_score(const CandidateMap& candidates, const GroundTruth& truth, int k, double p_thresh)
{
    if (k < 1)
        throw DomainError("k must be at least 1");
    if (truth.entries.empty())
        throw DomainError("empty ground truth");
    TopkScore score;
    for (const auto& entry : truth.entries)
    {
        if (!entry.base_column)
            continue;
        const auto it = candidates.find(*entry.base_column);
        if (it == candidates.end())
            continue;
        const auto& ranked = it->second;
        const bool any_comparable = std::ranges::any_of(ranked, &CandidateScore::comparable);
        if (!ranked.empty() && !any_comparable)
            continue;
        ++score.scored;
        const auto window = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
        const auto top = std::span(ranked).first(window);
        if (entry.change == ChangeKind::removed)
        {
            const bool passes = std::ranges::any_of(
                top, [&](const CandidateScore& c) { return c.comparable && *c.p_value >= p_thresh; });
            score.hits += passes ? 0 : 1;
        }
        else
        {
            const bool found = std::ranges::any_of(
                top, [&](const CandidateScore& c) { return c.comparable && c.new_column == *entry.new_column; });
            score.hits += found ? 1 : 0;
        }
    }
    return score;
}

double topk_accuracy(const CandidateMap& candidates, const GroundTruth& truth, int k, double p_thresh)
{
    return topk_score(candidates, truth, k, p_thresh).accuracy();
}

std::vector<EvalRow>
run_year_by_year(std::span<const Table> releases, std::span<const GroundTruth> truths, const EvalConfig& config)
{
    return run_mode(releases, truths, config, false);
}

std::vector<EvalRow>
run_accumulated(std::span<const Table> releases, std::span<const GroundTruth> truths, const EvalConfig& config)
{
    return run_mode(releases, truths, config, true);
}

nlohmann::json eval_to_json(std::span<const EvalRow> rows, const EvalConfig& config)
{
    const auto accuracy_map = [&](const std::map<TestKind, std::optional<double>>& values)
    {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [test, value] : values)
            out[std::string(to_string(test))] = value ? nlohmann::json(*value) : nlohmann::json(nullptr);
        return out;
    };
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows)
    {
        nlohmann::json entry{{"release", row.release}, {"k", config.match.top_k}};
        if (row.changes)
        {
            entry["changes"] = {
                {"changed", row.changes->changed},
                {"added", row.changes->added},
                {"removed", row.changes->removed},
                {"label", format_changes(*row.changes)}};
        }
        else
        {
            entry["changes"] = nullptr;
        }
        entry["top1"] = accuracy_map(row.top1);
        entry["topk"] = accuracy_map(row.topk);
        nlohmann::json detected = nlohmann::json::object();
        for (const auto& [test, counts] : row.detected)
            detected[std::string(to_string(test))]
                = {{"changed", counts.changed}, {"added", counts.added}, {"removed", counts.removed}};
        entry["detected"] = std::move(detected);
        entry["scored_columns"] = row.scored_columns;
        entry["unscored"] = row.unscored;
        out.push_back(std::move(entry));
    }
    return out;
}

std::string render_eval_table(std::span<const EvalRow> rows, const EvalConfig& config, bool use_topk)
{
    std::ostringstream out;
    out << "Year & Changes";
    for (const auto test : config.tests)
        out << " & " << test_heading(test);
    out << '\n';

    std::map<TestKind, std::vector<double>> columns;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const auto& row = rows[i];
        out << row.release << " & " << (row.changes ? format_changes(*row.changes) : "-");
        const auto& values = use_topk ? row.topk : row.top1;
        for (const auto test : config.tests)
        {
            const auto it = values.find(test);
            if (it == values.end() || !it->second)
            {
                out << " & -";
                continue;
            }
            out << " & " << format_fixed3(*it->second);
            columns[test].push_back(*it->second);
        }
        out << '\n';
    }

    out << "Average (stdev) &";
    for (const auto test : config.tests)
    {
        const auto& v = columns[test];
        if (v.empty())
        {
            out << " & -";
            continue;
        }
        double mean = 0.0;
        for (const double x : v)
            mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (const double x : v)
            var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size());
        out << " & " << format_fixed3(mean) << " (" << format_fixed3(std::sqrt(var)) << ')';
    }
    out << '\n';
    return out.str();
}

void SyntheticSpec::validate() const
{
    if (years < 1)
        throw ValidationError("years must be at least 1");
    if (rows_per_year < 1)
        throw ValidationError("rows_per_year must be at least 1");
    if (!(row_turnover >= 0.0 && row_turnover <= 1.0))
        throw ValidationError("row_turnover must lie in [0, 1]");
    std::set<std::string> names;
    for (const auto& c : columns)
    {
        validate_column_spec(c);
        if (!names.insert(c.name).second)
            throw ValidationError("duplicate column '" + c.name + "'");
    }
    for (const auto& m : mutations)
    {
        if (m.year < 2 || m.year > years)
            throw ValidationError("mutation on column '" + m.column + "' has year outside [2, years]");
        if (m.op == MutationOp::add && !m.added)
            throw ValidationError("add mutation for '" + m.column + "' lacks a distribution");
        if (m.op == MutationOp::add)
            validate_column_spec(*m.added);
        if (m.op == MutationOp::rename && m.to.empty())
            throw ValidationError("rename of '" + m.column + "' lacks a target name");
    }
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc)
{
    try
    {
        SyntheticSpec spec;
        spec.years = doc.at("years").get<int>();
        spec.rows_per_year = doc.value("rows_per_year", spec.rows_per_year);
        spec.seed = doc.value("seed", spec.seed);
        spec.first_release = doc.value("first_release", spec.first_release);
        spec.row_turnover = doc.value("row_turnover", spec.row_turnover);
        for (const auto& c : doc.at("columns"))
            spec.columns.push_back(column_spec_from_json(c));
        if (doc.contains("mutations"))
        {
            for (const auto& m : doc.at("mutations"))
            {
                Mutation mutation;
                mutation.year = m.at("year").get<int>();
                mutation.op = parse_op(m.at("op").get<std::string>());
                mutation.column = m.at("column").get<std::string>();
                mutation.to = m.value("to", std::string{});
                mutation.shift = m.value("shift", 0.0);
                if (mutation.op == MutationOp::add)
                {
                    mutation.added = ColumnSpec{
                        mutation.column,
                        parse_family(m.at("family").get<std::string>()),
                        m.at("params").get<std::vector<double>>()};
                }
                spec.mutations.push_back(std::move(mutation));
            }
        }
        spec.validate();
        return spec;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError(std::string("malformed synthetic spec: ") + e.what());
    }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec)
{
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<LiveColumn> live;
    const auto fresh = [&](const ColumnSpec& c)
    {
        LiveColumn column{c, {}, 0.0};
        column.draws.reserve(spec.rows_per_year);
        for (std::size_t r = 0; r < spec.rows_per_year; ++r)
            column.draws.push_back(draw(c, rng));
        return column;
    };
    const auto find_live = [&](const std::string& name, int year)
    {
        const auto it = std::ranges::find_if(live, [&](const LiveColumn& c) { return c.spec.name == name; });
        if (it == live.end())
            throw ValidationError("mutation in year " + std::to_string(year) + " references unknown column '" + name + "'");
        return it;
    };
    const auto snapshot = [&](int year_index)
    {
        Table table;
        table.name = std::to_string(spec.first_release + year_index);
        table.row_count = spec.rows_per_year;
        for (const auto& c : live)
        {
            RawColumn raw{c.spec.name, {}};
            raw.cells.reserve(c.draws.size());
            for (const double v : c.draws)
                raw.cells.emplace_back(format_double(v + c.offset));
            table.columns.push_back(std::move(raw));
        }
        return table;
    };

    for (const auto& c : spec.columns)
        live.push_back(fresh(c));

    SyntheticData data;
    data.releases.push_back(snapshot(0));

    for (int year = 2; year <= spec.years; ++year)
    {
        // Carry rows forward with turnover before applying this year's mutations.
        for (auto& c : live)
            for (auto& v : c.draws)
                if (unit(rng) < spec.row_turnover)
                    v = draw(c.spec, rng);

        std::vector<std::string> previous_names;
        for (const auto& c : live)
            previous_names.push_back(c.spec.name);
        std::map<std::string, std::optional<std::string>> fate;
        for (const auto& name : previous_names)
            fate[name] = name;
        std::vector<std::string> added;

        for (const auto& m : spec.mutations)
        {
            if (m.year != year)
                continue;
            switch (m.op)
            {
                case MutationOp::rename:
                {
                    auto it = find_live(m.column, year);
                    if (std::ranges::any_of(live, [&](const LiveColumn& c) { return c.spec.name == m.to; }))
                        throw ValidationError("rename target '" + m.to + "' already exists in year " + std::to_string(year));
                    for (auto& [old, current] : fate)
                        if (current == m.column)
                            current = m.to;
                    std::ranges::replace(added, m.column, m.to);
                    it->spec.name = m.to;
                    break;
                }
                case MutationOp::add:
                {
                    if (std::ranges::any_of(live, [&](const LiveColumn& c) { return c.spec.name == m.column; }))
                        throw ValidationError("added column '" + m.column + "' already exists in year " + std::to_string(year));
                    live.push_back(fresh(*m.added));
                    added.push_back(m.column);
                    break;
                }
                case MutationOp::remove:
                {
                    auto it = find_live(m.column, year);
                    for (auto& [old, current] : fate)
                        if (current == m.column)
                            current.reset();
                    std::erase(added, m.column);
                    live.erase(it);
                    break;
                }
                case MutationOp::drift:
                    find_live(m.column, year)->offset += m.shift;
                    break;
            }
        }

        GroundTruth truth;
        truth.release_from = data.releases.back().name;
        data.releases.push_back(snapshot(year - 1));
        truth.release_to = data.releases.back().name;
        for (const auto& name : previous_names)
        {
            const auto& now = fate[name];
            if (!now)
                truth.entries.push_back(TruthEntry{name, std::nullopt, ChangeKind::removed});
            else
                truth.entries.push_back(TruthEntry{name, *now, *now == name ? ChangeKind::same : ChangeKind::renamed});
        }
        for (const auto& name : added)
            truth.entries.push_back(TruthEntry{std::nullopt, name, ChangeKind::added});
        truth.validate();
        data.truths.push_back(std::move(truth));
    }
    return data;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir / "data", ec);
    std::filesystem::create_directories(dir / "gt", ec);
    if (ec)
        throw IoError("cannot create output directories under '" + dir.string() + "'");
    for (const auto& table : data.releases)
    {
        const auto path = dir / "data" / (table.name + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot write '" + path.string() + "'");
        write_table(table, out);
    }
    for (const auto& truth : data.truths)
    {
        const auto path = dir / "gt" / ground_truth_file_name(truth.release_from, truth.release_to);
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot write '" + path.string() + "'");
        write_ground_truth(truth, out);
    }
}

SyntheticData load_lineage(const std::filesystem::path& data_dir, const std::filesystem::path& gt_dir)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(data_dir, ec))
        throw IoError("data directory '" + data_dir.string() + "' does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(data_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::ranges::sort(files, [](const auto& a, const auto& b) { return release_before(a.stem().string(), b.stem().string()); });

    SyntheticData data;
    for (const auto& f : files)
        data.releases.push_back(load_table(f));
    for (std::size_t i = 1; i < data.releases.size(); ++i)
    {
        const auto& from = data.releases[i - 1].name;
        const auto& to = data.releases[i].name;
        const auto path = gt_dir / ground_truth_file_name(from, to);
        if (!std::filesystem::exists(path, ec))
            throw ValidationError("missing ground truth file '" + path.string() + "'");
        data.truths.push_back(load_ground_truth(path, from, to));
    }
    return data;
}

}
