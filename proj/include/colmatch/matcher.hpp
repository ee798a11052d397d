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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <colmatch/gof.hpp>
#include <colmatch/ingest.hpp>
#include <colmatch/preprocess.hpp>

namespace colmatch
{

enum class BaseOrder
{
    schema_order,
    confidence_order
};

std::string_view to_string(BaseOrder order);
BaseOrder parse_base_order(std::string_view text);

struct MatchConfig
{
    TestKind test = TestKind::ks;
    double p_thresh = 0.9;
    int bins = default_bins;
    double outlier_factor = default_outlier_factor;
    int top_k = 3;
    BaseOrder base_order = BaseOrder::schema_order;

    /// Throws ValidationError when a field is out of range.
    void validate() const;
    bool operator==(const MatchConfig&) const = default;
};

/// Shared-edge histograms of one scored pair, as bin weights. Carried for review displays.
struct PairHistogram
{
    std::vector<double> edges;
    std::vector<double> base_weights;
    std::vector<double> new_weights;
    bool operator==(const PairHistogram&) const = default;
};

struct CandidateScore
{
    std::string base_column;
    std::string new_column;
    TestKind test = TestKind::ks;
    /// Both absent iff the pair is incomparable.
    std::optional<double> statistic;
    std::optional<double> p_value;
    bool comparable = false;
    std::optional<PairHistogram> histogram;
    bool operator==(const CandidateScore&) const = default;
};

/// A column after outlier removal, one value vector per release it covers (several for a pooled history).
struct PreparedColumn
{
    std::string name;
    std::vector<std::vector<double>> releases;

    [[nodiscard]] bool empty() const;
};

PreparedColumn prepare_column(const NumericColumn& column, double outlier_factor = default_outlier_factor);

/// Pooled history, oldest release first. Each release is filtered on its own.
PreparedColumn prepare_history(
    std::string name, std::span<const NumericColumn> history, double outlier_factor = default_outlier_factor);

/// Scores one pair through shared edges, histograms and the configured test. Multi-release bases are
/// normalized per release and pooled with equal weight.
CandidateScore score_pair(const PreparedColumn& base, const PreparedColumn& candidate, const MatchConfig& config);

/// Strict weak order for candidates: p-value descending, then closeness of the statistic to its null
/// value, then new-column name. Incomparable pairs sort last.
bool candidate_before(const CandidateScore& a, const CandidateScore& b);

std::vector<CandidateScore>
rank_prepared(const PreparedColumn& base, std::span<const PreparedColumn> news, const MatchConfig& config);

std::vector<CandidateScore>
rank_candidates(const NumericColumn& base, std::span<const NumericColumn> news, const MatchConfig& config);

struct MatchPair
{
    std::optional<std::string> base_column;
    std::optional<std::string> new_column;
    std::optional<double> p_value;
    std::optional<double> statistic;
    /// Base column with no candidate passing the gate.
    bool below_threshold = false;
    bool operator==(const MatchPair&) const = default;
};

enum class ColumnLabel
{
    identical,
    new_column,
    no_data
};

std::string_view to_string(ColumnLabel label);
ColumnLabel parse_column_label(std::string_view text);

struct ChangeCounts
{
    std::size_t changed = 0;
    std::size_t added = 0;
    std::size_t removed = 0;
    bool operator==(const ChangeCounts&) const = default;
};

/// "[z]c [x]+ [y]-", or "no change" when all counts are zero.
std::string format_changes(const ChangeCounts& counts);

struct MatchReport
{
    std::string base_release;
    std::string new_release;
    MatchConfig config;
    std::vector<std::string> base_columns;
    std::vector<std::string> new_columns;
    std::vector<MatchPair> pairs;
    std::map<std::string, std::vector<CandidateScore>> candidates;
    std::map<std::string, ColumnLabel> base_labels;
    std::map<std::string, ColumnLabel> new_labels;
    std::vector<std::string> unscored_base;
    std::vector<std::string> unscored_new;
    bool operator==(const MatchReport&) const = default;
};

/// Greedy threshold-gated matching. Base columns are visited in schema (or confidence) order; each takes
/// its best-ranked unconsumed candidate with p >= p_thresh, or is recorded against NULL. Unconsumed new
/// columns are recorded as (NULL, new).
MatchReport column_match_prepared(
    std::span<const PreparedColumn> curr, std::span<const PreparedColumn> news, const MatchConfig& config);

MatchReport
column_match(std::span<const NumericColumn> curr, std::span<const NumericColumn> news, const MatchConfig& config);

/// Splits both tables into numeric and unscored columns and runs column_match on the numeric ones.
MatchReport match_tables(
    const Table& base, const Table& next, const MatchConfig& config, double numeric_threshold = default_numeric_threshold);

ChangeCounts classify_changes(const MatchReport& report);

/// Throws ValidationError unless every base and new column appears exactly once and no new column is
/// matched twice.
void check_injective(const MatchReport& report);

}
