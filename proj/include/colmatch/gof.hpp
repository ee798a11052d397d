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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <colmatch/preprocess.hpp>

namespace colmatch
{

enum class TestKind
{
    ks,
    ad,
    welch,
    f
};

std::string_view to_string(TestKind kind);
/// Accepts "ks", "ad", "welch", "f" (case-insensitive). Throws ValidationError otherwise.
TestKind parse_test_kind(std::string_view text);

/// A sample as distinct ascending points with positive (possibly fractional) multiplicities.
///
/// `n_effective` is the tuple count the sample stands for; it drives the asymptotic p-values.
/// `edges` is set when the sample came from a histogram and is used to reject comparisons of
/// samples binned on different grids.
struct WeightedSample
{
    std::vector<double> points;
    std::vector<double> counts;
    double n_effective = 0.0;
    std::optional<std::vector<double>> edges;

    [[nodiscard]] double total_count() const;
};

/// Bin midpoints weighted by counts (or normalized weights times the tuple total). Empty bins are dropped.
WeightedSample from_histogram(const Histogram& histogram);

/// Unit-count sample from raw values; ties are merged into multiplicities.
WeightedSample from_values(std::span<const double> values);

struct TestResult
{
    TestKind test = TestKind::ks;
    double statistic = 0.0;
    double p_value = 1.0;
    double m = 0.0;
    double n = 0.0;
};

/// Two-sample Kolmogorov-Smirnov: largest gap between the empirical CDFs over all pooled points.
TestResult ks_test(const WeightedSample& x, const WeightedSample& y);

/// The KS distance alone (no p-value).
double ks_statistic(const WeightedSample& x, const WeightedSample& y);

/// Two-sample Anderson-Darling statistic in the 1/(N m n) normalization, evaluated over the distinct
/// pooled points with each term weighted by its pooled multiplicity.
double ad_statistic(const WeightedSample& x, const WeightedSample& y);

/// Anderson-Darling test. Pooled samples of at most `ad_exact_limit` observations get an exhaustive
/// permutation p-value; larger ones use the Scholz-Stephens standardization mapped onto the limiting
/// distribution.
TestResult ad_test(const WeightedSample& x, const WeightedSample& y);

inline constexpr double ad_exact_limit = 10.0;

struct Moments
{
    double mean = 0.0;
    double variance = 0.0;
};

/// Weighted mean and unbiased variance (denominator n_effective - 1).
Moments weighted_moments(const WeightedSample& sample);

/// Variance ratio test with a two-sided p-value.
TestResult f_test(const WeightedSample& x, const WeightedSample& y);

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
TestResult welch_test(const WeightedSample& x, const WeightedSample& y);

TestResult run_test(TestKind kind, const WeightedSample& x, const WeightedSample& y);

using StatisticFn = std::function<double(const WeightedSample&, const WeightedSample&)>;

/// Fraction of relabelings of the pooled sample whose statistic is at least the observed one.
/// Counts are rounded to integers and expanded. Pooled sizes up to 10 are enumerated exhaustively;
/// larger ones draw `iterations` random relabelings from a generator seeded with `seed`.
double permutation_pvalue(
    const WeightedSample& x, const WeightedSample& y, const StatisticFn& statistic, int iterations, std::uint64_t seed);

/// Distance of a statistic from its null value, used to order candidates with equal p-values.
double null_distance(TestKind kind, double statistic);

}
