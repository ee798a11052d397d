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
#include <colmatch/matcher.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

#include <colmatch/error.hpp>

namespace colmatch
{
namespace
{

std::vector<double> weights_of(const Histogram& h)
{
    if (h.normalized)
        return *h.normalized;
    return normalize_histogram(h).normalized.value();
}

void require_unique(std::span<const PreparedColumn> columns, const char* side)
{
    std::unordered_set<std::string> seen;
    for (const auto& c : columns)
        if (!seen.insert(c.name).second)
            throw ValidationError(std::string("duplicate ") + side + " column '" + c.name + "'");
}

std::optional<double> best_p(const std::vector<CandidateScore>& ranked)
{
    for (const auto& c : ranked)
        if (c.comparable)
            return c.p_value;
    return std::nullopt;
}

}

std::string_view to_string(BaseOrder order)
{
    return order == BaseOrder::schema_order ? "schema_order" : "confidence_order";
}

BaseOrder parse_base_order(std::string_view text)
{
    if (text == "schema_order" || text == "schema")
        return BaseOrder::schema_order;
    if (text == "confidence_order" || text == "confidence")
        return BaseOrder::confidence_order;
    throw ValidationError("unknown base order '" + std::string(text) + "'");
}

void MatchConfig::validate() const
{
    if (!(p_thresh >= 0.0 && p_thresh <= 1.0))
        throw ValidationError("p_thresh must lie in [0, 1]");
    if (bins < 1)
        throw ValidationError("bins must be at least 1");
    if (!(outlier_factor > 0.0))
        throw ValidationError("outlier_factor must be positive");
    if (top_k < 1)
        throw ValidationError("top_k must be at least 1");
}

bool PreparedColumn::empty() const
{
    return std::ranges::all_of(releases, [](const auto& r) { return r.empty(); });
}

PreparedColumn prepare_column(const NumericColumn& column, double outlier_factor)
{
    PreparedColumn out{column.name, {}};
    if (column.values.empty())
        out.releases.emplace_back();
    else
        out.releases.push_back(remove_outliers_iqr(column.values, outlier_factor).values);
    return out;
}

PreparedColumn prepare_history(std::string name, std::span<const NumericColumn> history, double outlier_factor)
{
    PreparedColumn out{std::move(name), {}};
    for (const auto& release : history)
    {
        if (release.values.empty())
            continue;
        out.releases.push_back(remove_outliers_iqr(release.values, outlier_factor).values);
    }
    if (out.releases.empty())
        out.releases.emplace_back();
    return out;
}

CandidateScore score_pair(const PreparedColumn& base, const PreparedColumn& candidate, const MatchConfig& config)
{
    CandidateScore score{base.name, candidate.name, config.test, std::nullopt, std::nullopt, false, std::nullopt};
    if (base.empty() || candidate.empty())
        return score;

    std::vector<double> base_all;
    std::vector<double> candidate_all;
    for (const auto& r : base.releases)
        base_all.insert(base_all.end(), r.begin(), r.end());
    for (const auto& r : candidate.releases)
        candidate_all.insert(candidate_all.end(), r.begin(), r.end());

    const auto edges = shared_edges(base_all, candidate_all, config.bins);
    Histogram base_hist;
    std::size_t filled = 0;
    for (const auto& r : base.releases)
        filled += r.empty() ? 0 : 1;
    if (filled == 1)
    {
        base_hist = build_histogram(base_all, edges);
    }
    else
    {
        std::vector<Histogram> per_release;
        for (const auto& r : base.releases)
            if (!r.empty())
                per_release.push_back(normalize_histogram(build_histogram(r, edges)));
        base_hist = pool_years(per_release);
    }
    const auto candidate_hist = build_histogram(candidate_all, edges);

    score.histogram = PairHistogram{edges, weights_of(base_hist), weights_of(candidate_hist)};
    try
    {
        const auto result = run_test(config.test, from_histogram(base_hist), from_histogram(candidate_hist));
        score.statistic = result.statistic;
        score.p_value = result.p_value;
        score.comparable = true;
    }
    catch (const DegenerateVarianceError&)
    {
        score.comparable = false;
    }
    return score;
}

bool candidate_before(const CandidateScore& a, const CandidateScore& b)
{
    if (a.comparable != b.comparable)
        return a.comparable;
    if (a.comparable)
    {
        if (*a.p_value != *b.p_value)
            return *a.p_value > *b.p_value;
        const double da = null_distance(a.test, *a.statistic);
        const double db = null_distance(b.test, *b.statistic);
        if (da != db)
            return da < db;
    }
    return a.new_column < b.new_column;
}

std::vector<CandidateScore>
rank_prepared(const PreparedColumn& base, std::span<const PreparedColumn> news, const MatchConfig& config)
{
    std::vector<CandidateScore> ranked;
    ranked.reserve(news.size());
    for (const auto& candidate : news)
        ranked.push_back(score_pair(base, candidate, config));
    std::ranges::sort(ranked, candidate_before);
    return ranked;
}

std::vector<CandidateScore>
rank_candidates(const NumericColumn& base, std::span<const NumericColumn> news, const MatchConfig& config)
{
    config.validate();
    const auto prepared_base = prepare_column(base, config.outlier_factor);
    std::vector<PreparedColumn> prepared;
    prepared.reserve(news.size());
    for (const auto& c : news)
        prepared.push_back(prepare_column(c, config.outlier_factor));
    return rank_prepared(prepared_base, prepared, config);
}

std::string_view to_string(ColumnLabel label)
{
    switch (label)
    {
        case ColumnLabel::identical:
            return "identical";
        case ColumnLabel::new_column:
            return "new";
        case ColumnLabel::no_data:
            return "no_data";
    }
    return "identical";
}

ColumnLabel parse_column_label(std::string_view text)
{
    if (text == "identical")
        return ColumnLabel::identical;
    if (text == "new")
        return ColumnLabel::new_column;
    if (text == "no_data")
        return ColumnLabel::no_data;
    throw ValidationError("unknown column label '" + std::string(text) + "'");
}

std::string format_changes(const ChangeCounts& counts)
{
    if (counts == ChangeCounts{})
        return "no change";
    return "[" + std::to_string(counts.changed) + "]c [" + std::to_string(counts.added) + "]+ ["
        + std::to_string(counts.removed) + "]-";
}

MatchReport column_match_prepared(
    std::span<const PreparedColumn> curr, std::span<const PreparedColumn> news, const MatchConfig& config)
{
    config.validate();
    require_unique(curr, "base");
    require_unique(news, "new");

    MatchReport report;
    report.config = config;
    for (const auto& c : curr)
        report.base_columns.push_back(c.name);
    for (const auto& c : news)
        report.new_columns.push_back(c.name);
    for (const auto& base : curr)
        report.candidates[base.name] = rank_prepared(base, news, config);

    std::vector<std::size_t> order(curr.size());
    std::iota(order.begin(), order.end(), 0);
    if (config.base_order == BaseOrder::confidence_order)
    {
        std::ranges::stable_sort(
            order,
            [&](std::size_t a, std::size_t b)
            {
                return best_p(report.candidates[curr[a].name]).value_or(-1.0)
                    > best_p(report.candidates[curr[b].name]).value_or(-1.0);
            });
    }

    std::set<std::string> consumed;
    for (const std::size_t index : order)
    {
        const auto& base = curr[index].name;
        MatchPair pair{base, std::nullopt, std::nullopt, std::nullopt, true};
        for (const auto& c : report.candidates[base])
        {
            if (!c.comparable || *c.p_value < config.p_thresh || consumed.contains(c.new_column))
                continue;
            pair.new_column = c.new_column;
            pair.p_value = c.p_value;
            pair.statistic = c.statistic;
            pair.below_threshold = false;
            consumed.insert(c.new_column);
            break;
        }
        if (pair.new_column)
        {
            report.base_labels[base] = ColumnLabel::identical;
            report.new_labels[*pair.new_column] = ColumnLabel::identical;
        }
        else
        {
            report.base_labels[base] = ColumnLabel::no_data;
        }
        report.pairs.push_back(std::move(pair));
    }
    for (const auto& c : news)
    {
        if (consumed.contains(c.name))
            continue;
        report.pairs.push_back(MatchPair{std::nullopt, c.name, std::nullopt, std::nullopt, false});
        report.new_labels[c.name] = ColumnLabel::new_column;
    }
    check_injective(report);
    return report;
}

MatchReport
column_match(std::span<const NumericColumn> curr, std::span<const NumericColumn> news, const MatchConfig& config)
{
    config.validate();
    std::vector<PreparedColumn> base;
    std::vector<PreparedColumn> next;
    for (const auto& c : curr)
        base.push_back(prepare_column(c, config.outlier_factor));
    for (const auto& c : news)
        next.push_back(prepare_column(c, config.outlier_factor));
    auto report = column_match_prepared(base, next, config);
    if (!curr.empty())
        report.base_release = curr.front().release;
    if (!news.empty())
        report.new_release = news.front().release;
    return report;
}

MatchReport match_tables(const Table& base, const Table& next, const MatchConfig& config, double numeric_threshold)
{
    std::vector<NumericColumn> base_numeric;
    std::vector<NumericColumn> next_numeric;
    std::vector<std::string> unscored_base;
    std::vector<std::string> unscored_new;
    for (const auto& c : base.columns)
    {
        if (infer_kind(c, numeric_threshold) == ColumnKind::numeric)
            base_numeric.push_back(to_numeric_column(c, base.name, KindCheck::skip));
        else
            unscored_base.push_back(c.name);
    }
    for (const auto& c : next.columns)
    {
        if (infer_kind(c, numeric_threshold) == ColumnKind::numeric)
            next_numeric.push_back(to_numeric_column(c, next.name, KindCheck::skip));
        else
            unscored_new.push_back(c.name);
    }
    auto report = column_match(base_numeric, next_numeric, config);
    report.base_release = base.name;
    report.new_release = next.name;
    report.unscored_base = std::move(unscored_base);
    report.unscored_new = std::move(unscored_new);
    return report;
}

ChangeCounts classify_changes(const MatchReport& report)
{
    ChangeCounts counts;
    for (const auto& pair : report.pairs)
    {
        if (pair.base_column && pair.new_column)
            counts.changed += *pair.base_column != *pair.new_column ? 1 : 0;
        else if (pair.new_column)
            ++counts.added;
        else if (pair.base_column)
            ++counts.removed;
    }
    return counts;
}

void check_injective(const MatchReport& report)
{
    std::map<std::string, int> base_seen;
    std::map<std::string, int> new_seen;
    for (const auto& pair : report.pairs)
    {
        if (!pair.base_column && !pair.new_column)
            throw ValidationError("pair with neither side set");
        if (pair.base_column)
            ++base_seen[*pair.base_column];
        if (pair.new_column)
            ++new_seen[*pair.new_column];
    }
    for (const auto& name : report.base_columns)
        if (base_seen[name] != 1)
            throw ValidationError("base column '" + name + "' appears " + std::to_string(base_seen[name]) + " times");
    for (const auto& name : report.new_columns)
        if (new_seen[name] != 1)
            throw ValidationError("new column '" + name + "' appears " + std::to_string(new_seen[name]) + " times");
    if (base_seen.size() != report.base_columns.size() || new_seen.size() != report.new_columns.size())
        throw ValidationError("pairs reference columns outside the report");
}

}
