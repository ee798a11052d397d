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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <colmatch/ingest.hpp>
#include <colmatch/matcher.hpp>

namespace colmatch
{

enum class ChangeKind
{
    same,
    renamed,
    added,
    removed
};

std::string_view to_string(ChangeKind kind);

struct TruthEntry
{
    std::optional<std::string> base_column;
    std::optional<std::string> new_column;
    ChangeKind change = ChangeKind::same;
    bool operator==(const TruthEntry&) const = default;
};

/// Declared mapping between two adjacent releases.
struct GroundTruth
{
    std::string release_from;
    std::string release_to;
    std::vector<TruthEntry> entries;

    /// Throws ValidationError on a label/name mismatch or a non-injective mapping.
    void validate() const;
    [[nodiscard]] ChangeCounts counts() const;
    [[nodiscard]] const TruthEntry* for_base(std::string_view base) const;
    [[nodiscard]] const TruthEntry* for_new(std::string_view name) const;
    bool operator==(const GroundTruth&) const = default;
};

/// CSV with header `base_column,new_column,change`; an empty field is NULL; lines starting with '#' are
/// comments. Errors name the offending line.
GroundTruth parse_ground_truth(std::string_view text, std::string release_from = {}, std::string release_to = {});

/// When labels are not given, a file stem of the form `<from>-<to>` supplies them.
GroundTruth load_ground_truth(
    const std::filesystem::path& path, std::string release_from = {}, std::string release_to = {});

void write_ground_truth(const GroundTruth& truth, std::ostream& out);

/// File name used for the pair (from, to) in a ground-truth directory.
std::string ground_truth_file_name(std::string_view from, std::string_view to);

struct TopkScore
{
    std::size_t hits = 0;
    std::size_t scored = 0;
    [[nodiscard]] double accuracy() const;
};

using CandidateMap = std::map<std::string, std::vector<CandidateScore>>;

/// Hits over scored base columns. A kept column hits when its partner is among its k best comparable
/// candidates; a removed column hits when none of its k best candidates passes `p_thresh`. Base
/// columns absent from `candidates`, or whose candidates are all incomparable, are not scored.
TopkScore topk_score(const CandidateMap& candidates, const GroundTruth& truth, int k, double p_thresh);

/// hits / scored. Throws DomainError for an empty ground truth or when nothing could be scored.
double topk_accuracy(const CandidateMap& candidates, const GroundTruth& truth, int k, double p_thresh = 0.9);

struct EvalConfig
{
    MatchConfig match;
    std::vector<TestKind> tests{TestKind::ks, TestKind::ad, TestKind::welch, TestKind::f};
    double numeric_threshold = default_numeric_threshold;
};

/// One row of an accuracy table. The first release has no changes and no accuracies.
struct EvalRow
{
    std::string release;
    std::optional<ChangeCounts> changes;
    std::map<TestKind, std::optional<double>> top1;
    std::map<TestKind, std::optional<double>> topk;
    std::map<TestKind, ChangeCounts> detected;
    std::size_t scored_columns = 0;
    std::vector<std::string> unscored;
};

/// Matches every release against the previous one.
std::vector<EvalRow>
run_year_by_year(std::span<const Table> releases, std::span<const GroundTruth> truths, const EvalConfig& config);

/// Matches every release against the pooled, per-release-normalized history of all earlier releases.
/// Column identity across releases follows the ground-truth chain.
std::vector<EvalRow>
run_accumulated(std::span<const Table> releases, std::span<const GroundTruth> truths, const EvalConfig& config);

nlohmann::json eval_to_json(std::span<const EvalRow> rows, const EvalConfig& config);

/// Text table in the layout `Year & Changes & K-S Test & ...`, one row per release, first row dashes,
/// followed by an `Average (stdev)` row. `use_topk` selects the Top-k columns instead of Top-1.
std::string render_eval_table(std::span<const EvalRow> rows, const EvalConfig& config, bool use_topk);

// Synthetic lineages standing in for real releases.

enum class Family
{
    uniform,
    normal,
    lognormal,
    poisson
};

struct ColumnSpec
{
    std::string name;
    Family family = Family::normal;
    std::vector<double> params;
};

enum class MutationOp
{
    rename,
    add,
    remove,
    drift
};

struct Mutation
{
    int year = 2;
    MutationOp op = MutationOp::drift;
    std::string column;
    /// rename target
    std::string to;
    /// add: distribution of the new column
    std::optional<ColumnSpec> added;
    /// drift: additive mean shift applied from `year` on
    double shift = 0.0;
};

struct SyntheticSpec
{
    int years = 1;
    std::vector<ColumnSpec> columns;
    std::vector<Mutation> mutations;
    std::size_t rows_per_year = 1000;
    std::uint64_t seed = 0;
    /// Release labels are first_release, first_release + 1, ...
    int first_release = 1;
    /// Fraction of rows redrawn from the column distribution between consecutive releases.
    double row_turnover = 0.1;

    void validate() const;
};

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc);

struct SyntheticData
{
    std::vector<Table> releases;
    std::vector<GroundTruth> truths;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Writes `<dir>/data/<release>.csv` and `<dir>/gt/<from>-<to>.csv`.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir);

/// Loads every `*.csv` in `data_dir` (releases ordered by name, numerically when names are integers) and
/// the ground truth of each adjacent pair from `gt_dir`.
SyntheticData load_lineage(const std::filesystem::path& data_dir, const std::filesystem::path& gt_dir);

}
