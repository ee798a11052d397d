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
#include <colmatch/preprocess.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <colmatch/error.hpp>

namespace colmatch
{

double quantile_sorted(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw DomainError("quantile of an empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

QuartileSummary quartiles(std::span<const double> values, double factor)
{
    if (values.empty())
        throw DomainError("quartiles of an empty sample");
    if (!(factor > 0.0))
        throw DomainError("outlier factor must be positive");
    std::vector<double> sorted(values.begin(), values.end());
    std::ranges::sort(sorted);
    QuartileSummary summary;
    summary.q1 = quantile_sorted(sorted, 0.25);
    summary.q3 = quantile_sorted(sorted, 0.75);
    summary.iqr = summary.q3 - summary.q1;
    summary.lower_fence = summary.q1 - factor * summary.iqr;
    summary.upper_fence = summary.q3 + factor * summary.iqr;
    return summary;
}

OutlierFilterResult remove_outliers_iqr(std::span<const double> values, double factor)
{
    const auto summary = quartiles(values, factor);
    OutlierFilterResult result;
    result.values.reserve(values.size());
    std::ranges::copy_if(
        values,
        std::back_inserter(result.values),
        [&](double v) { return v >= summary.lower_fence && v <= summary.upper_fence; });
    result.all_removed = result.values.empty();
    return result;
}

std::vector<double> shared_edges(std::span<const double> x, std::span<const double> y, int bins)
{
    if (x.empty() || y.empty())
        throw DomainError("shared edges need two nonempty samples");
    if (bins < 1)
        throw DomainError("bin count must be positive");
    const auto [xmin, xmax] = std::ranges::minmax(x);
    const auto [ymin, ymax] = std::ranges::minmax(y);
    const double lo = std::min(xmin, ymin);
    const double hi = std::max(xmax, ymax);
    if (lo == hi)
    {
        double top = lo + 1.0;
        if (!(top > lo))
            top = std::nextafter(lo, std::numeric_limits<double>::infinity());
        return {lo, top};
    }

    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    const double width = hi - lo;
    for (int i = 0; i <= bins; ++i)
        edges[static_cast<std::size_t>(i)] = lo + width * static_cast<double>(i) / static_cast<double>(bins);
    edges.back() = hi;
    // A range narrower than the representable spacing collapses interior edges.
    if (std::ranges::adjacent_find(edges, std::greater_equal<>{}) != edges.end())
        return {lo, hi};
    return edges;
}

Histogram build_histogram(std::span<const double> values, std::span<const double> edges)
{
    if (edges.size() < 2)
        throw DomainError("histogram needs at least two edges");
    if (std::ranges::adjacent_find(edges, std::greater_equal<>{}) != edges.end())
        throw DomainError("histogram edges must be strictly increasing");
    if (values.empty())
        throw DomainError("histogram of an empty sample");

    Histogram h;
    h.edges.assign(edges.begin(), edges.end());
    h.counts.assign(edges.size() - 1, 0);
    const auto last_bin = static_cast<std::ptrdiff_t>(h.counts.size()) - 1;
    for (const double v : values)
    {
        const auto upper = std::ranges::upper_bound(edges, v);
        const auto bin = std::clamp<std::ptrdiff_t>(std::distance(edges.begin(), upper) - 1, 0, last_bin);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    h.total = values.size();
    return h;
}

Histogram normalize_histogram(const Histogram& histogram)
{
    if (histogram.total == 0)
        throw DomainError("cannot normalize a histogram with zero tuples");
    Histogram out = histogram;
    std::vector<double> weights(histogram.counts.size());
    const auto total = static_cast<double>(histogram.total);
    std::ranges::transform(
        histogram.counts, weights.begin(), [total](std::size_t c) { return static_cast<double>(c) / total; });
    out.normalized = std::move(weights);
    out.years = 1;
    return out;
}

Histogram pool_years(std::span<const Histogram> histograms)
{
    if (histograms.empty())
        throw DomainError("nothing to pool");
    const auto& first = histograms.front();
    for (const auto& h : histograms)
    {
        if (!h.normalized)
            throw DomainError("pooling requires normalized histograms");
        if (h.edges != first.edges)
            throw DomainError("pooled histograms must share identical edges");
    }
    if (histograms.size() == 1)
        return first;

    Histogram pooled;
    pooled.edges = first.edges;
    pooled.counts.assign(first.counts.size(), 0);
    pooled.years = 0;
    std::vector<double> weights(first.counts.size(), 0.0);
    for (const auto& h : histograms)
    {
        for (std::size_t b = 0; b < weights.size(); ++b)
        {
            weights[b] += (*h.normalized)[b];
            pooled.counts[b] += h.counts[b];
        }
        pooled.total += h.total;
        pooled.years += h.years;
    }
    const auto k = static_cast<double>(histograms.size());
    for (auto& w : weights)
        w /= k;
    pooled.normalized = std::move(weights);
    return pooled;
}

}
