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
#include <optional>
#include <span>
#include <vector>

namespace colmatch
{

inline constexpr double default_outlier_factor = 1.5;
inline constexpr int default_bins = 10;

/// Fixed-edge histogram of a column sample.
///
/// `counts` always holds raw tuple counts. `normalized`, when present, holds bin weights summing to one:
/// for a single release they are count / total, for a pooled history (`years > 1`) they are the
/// equal-weight mean of the per-release weights and `counts`/`total` are the summed raw values.
struct Histogram
{
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    std::optional<std::vector<double>> normalized;
    std::size_t years = 1;

    [[nodiscard]] std::size_t bins() const noexcept { return counts.size(); }
    bool operator==(const Histogram&) const = default;
};

struct QuartileSummary
{
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double lower_fence = 0.0;
    double upper_fence = 0.0;
};

/// Type-7 quantile (linear interpolation at h = (n - 1) p) of an already sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

QuartileSummary quartiles(std::span<const double> values, double factor = default_outlier_factor);

struct OutlierFilterResult
{
    std::vector<double> values;
    /// Set when the filter removed every value; the caller decides what that means.
    bool all_removed = false;
};

/// Single-pass IQR filter. Fences come from the input sample; input order is preserved.
OutlierFilterResult remove_outliers_iqr(std::span<const double> values, double factor = default_outlier_factor);

/// `bins + 1` equally spaced edges spanning both samples. A constant pooled sample gets the single bin [v, v + 1].
std::vector<double> shared_edges(std::span<const double> x, std::span<const double> y, int bins = default_bins);

/// Bins are [e_i, e_{i+1}), the last one closed. Values outside the edges are clamped into the end bins.
Histogram build_histogram(std::span<const double> values, std::span<const double> edges);

Histogram normalize_histogram(const Histogram& histogram);

/// Equal-weight mean of normalized histograms sharing identical edges.
Histogram pool_years(std::span<const Histogram> histograms);

}
