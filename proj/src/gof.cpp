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
#include <colmatch/gof.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_map>

#include <colmatch/error.hpp>
#include <colmatch/ingest.hpp>
#include <colmatch/special.hpp>

namespace colmatch
{
namespace
{

void require_nonempty(const WeightedSample& s, const char* what)
{
    if (s.points.empty() || s.points.size() != s.counts.size())
        throw DomainError(std::string(what) + ": empty or malformed sample");
}

void require_same_grid(const WeightedSample& x, const WeightedSample& y)
{
    if (x.edges && y.edges && *x.edges != *y.edges)
        throw DomainError("samples were binned on different grids");
}

/// Walks the distinct pooled points in ascending order, calling
/// visit(point, x_count_at_point, y_count_at_point, is_last).
template <typename Visit>
void merge_walk(const WeightedSample& x, const WeightedSample& y, Visit&& visit)
{
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.points.size() || j < y.points.size())
    {
        double t;
        if (j == y.points.size() || (i < x.points.size() && x.points[i] <= y.points[j]))
            t = x.points[i];
        else
            t = y.points[j];
        double cx = 0.0;
        double cy = 0.0;
        if (i < x.points.size() && x.points[i] == t)
            cx = x.counts[i++];
        if (j < y.points.size() && y.points[j] == t)
            cy = y.counts[j++];
        visit(t, cx, cy, i == x.points.size() && j == y.points.size());
    }
}

struct HarmonicSums
{
    double h = 0.0;
    double g = 0.0;
};

/// h = sum_{i<N} 1/i and g = sum_{i=1}^{N-2} sum_{j=i+1}^{N-1} 1/((N-i) j), memoized per N.
HarmonicSums harmonic_sums(long long n_total)
{
    thread_local std::unordered_map<long long, HarmonicSums> cache;
    if (const auto it = cache.find(n_total); it != cache.end())
        return it->second;
    std::vector<double> partial(static_cast<std::size_t>(n_total), 0.0);
    for (long long i = 1; i < n_total; ++i)
        partial[static_cast<std::size_t>(i)] = partial[static_cast<std::size_t>(i - 1)] + 1.0 / static_cast<double>(i);
    HarmonicSums sums;
    sums.h = partial[static_cast<std::size_t>(n_total - 1)];
    for (long long i = 1; i <= n_total - 2; ++i)
        sums.g += (sums.h - partial[static_cast<std::size_t>(i)]) / static_cast<double>(n_total - i);
    if (cache.size() > 4096)
        cache.clear();
    cache.emplace(n_total, sums);
    return sums;
}

/// Variance of the k = 2 Anderson-Darling statistic A2_kN under the null (Scholz & Stephens).
double ad_null_variance(double m, double n)
{
    const long long n_total = std::llround(m + n);
    const auto N = static_cast<double>(n_total);
    const double k = 2.0;
    const double H = 1.0 / m + 1.0 / n;
    const auto [h, g] = harmonic_sums(n_total);
    const double a = (4 * g - 6) * (k - 1) + (10 - 6 * g) * H;
    const double b = (2 * g - 4) * k * k + 8 * h * k + (2 * g - 14 * h - 4) * H - 8 * h + 4 * g - 6;
    const double c = (6 * h + 2 * g - 2) * k * k + (4 * h - 4 * g + 6) * k + (2 * h - 6) * H + 4 * h;
    const double d = (2 * h + 6) * k * k - 4 * h * k;
    return (a * N * N * N + b * N * N + c * N + d) / ((N - 1) * (N - 2) * (N - 3));
}

double ad_asymptotic_pvalue(double statistic, double m, double n)
{
    // 1/(N m n) normalization -> Scholz-Stephens A2_kN, whose null mean is k - 1 = 1.
    const double N = m + n;
    const double a2kn = statistic * N / 2.0;
    const double sigma = std::sqrt(ad_null_variance(m, n));
    const double standardized = (a2kn - 1.0) / sigma;
    const double limit_sigma = std::sqrt(2.0 * (std::numbers::pi * std::numbers::pi - 9.0) / 3.0);
    const double z = 1.0 + limit_sigma * standardized;
    if (z <= 0.0)
        return 1.0;
    return std::clamp(1.0 - special::anderson_darling_limit_cdf(z), 0.0, 1.0);
}

std::vector<double> expand(const WeightedSample& s)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < s.points.size(); ++i)
    {
        const auto reps = std::llround(s.counts[i]);
        out.insert(out.end(), static_cast<std::size_t>(std::max(0LL, reps)), s.points[i]);
    }
    return out;
}

}

std::string_view to_string(TestKind kind)
{
    switch (kind)
    {
        case TestKind::ks:
            return "ks";
        case TestKind::ad:
            return "ad";
        case TestKind::welch:
            return "welch";
        case TestKind::f:
            return "f";
    }
    return "ks";
}

TestKind parse_test_kind(std::string_view text)
{
    const auto folded = normalize_name(text);
    if (folded == "ks")
        return TestKind::ks;
    if (folded == "ad")
        return TestKind::ad;
    if (folded == "welch")
        return TestKind::welch;
    if (folded == "f")
        return TestKind::f;
    throw ValidationError("unknown test '" + std::string(text) + "' (expected ks, ad, welch or f)");
}

double WeightedSample::total_count() const
{
    return std::accumulate(counts.begin(), counts.end(), 0.0);
}

WeightedSample from_histogram(const Histogram& histogram)
{
    if (histogram.edges.size() != histogram.counts.size() + 1)
        throw DomainError("histogram edges and counts disagree");
    WeightedSample s;
    s.n_effective = static_cast<double>(histogram.total);
    s.edges = histogram.edges;
    for (std::size_t b = 0; b < histogram.counts.size(); ++b)
    {
        const double weight = histogram.normalized ? (*histogram.normalized)[b] * s.n_effective
                                                   : static_cast<double>(histogram.counts[b]);
        if (weight <= 0.0)
            continue;
        s.points.push_back(0.5 * (histogram.edges[b] + histogram.edges[b + 1]));
        s.counts.push_back(weight);
    }
    if (s.points.empty())
        throw DomainError("histogram has no mass");
    return s;
}

WeightedSample from_values(std::span<const double> values)
{
    std::vector<double> sorted(values.begin(), values.end());
    std::ranges::sort(sorted);
    WeightedSample s;
    for (const double v : sorted)
    {
        if (!s.points.empty() && s.points.back() == v)
        {
            s.counts.back() += 1.0;
            continue;
        }
        s.points.push_back(v);
        s.counts.push_back(1.0);
    }
    s.n_effective = static_cast<double>(sorted.size());
    return s;
}

double ks_statistic(const WeightedSample& x, const WeightedSample& y)
{
    require_nonempty(x, "ks_test");
    require_nonempty(y, "ks_test");
    require_same_grid(x, y);
    const double m = x.total_count();
    const double n = y.total_count();
    double cum_x = 0.0;
    double cum_y = 0.0;
    double d = 0.0;
    merge_walk(
        x,
        y,
        [&](double, double cx, double cy, bool)
        {
            cum_x += cx;
            cum_y += cy;
            d = std::max(d, std::fabs(cum_x / m - cum_y / n));
        });
    return std::min(d, 1.0);
}

TestResult ks_test(const WeightedSample& x, const WeightedSample& y)
{
    const double d = ks_statistic(x, y);
    const double me = x.n_effective;
    const double ne = y.n_effective;
    const double root = std::sqrt(me * ne / (me + ne));
    const double lambda = (root + 0.12 + 0.11 / root) * d;
    return TestResult{TestKind::ks, d, special::ks_survival(lambda), me, ne};
}

double ad_statistic(const WeightedSample& x, const WeightedSample& y)
{
    require_nonempty(x, "ad_test");
    require_nonempty(y, "ad_test");
    require_same_grid(x, y);
    const double m = x.total_count();
    const double n = y.total_count();
    const double N = m + n;
    double cum_x = 0.0;
    double cum_y = 0.0;
    double sum = 0.0;
    merge_walk(
        x,
        y,
        [&](double, double cx, double cy, bool last)
        {
            cum_x += cx;
            cum_y += cy;
            if (last)
                return;
            const double pooled = cum_x + cum_y;
            const double multiplicity = cx + cy;
            const double dx = N * cum_x - pooled * m;
            const double dy = N * cum_y - pooled * n;
            sum += multiplicity * (dx * dx + dy * dy) / (pooled * (N - pooled));
        });
    return sum / (N * m * n);
}

TestResult ad_test(const WeightedSample& x, const WeightedSample& y)
{
    const double statistic = ad_statistic(x, y);
    const double m = x.total_count();
    const double n = y.total_count();
    double p;
    if (m + n <= ad_exact_limit + 1e-9)
        p = permutation_pvalue(x, y, ad_statistic, 0, 0);
    else
        p = ad_asymptotic_pvalue(statistic, m, n);
    return TestResult{TestKind::ad, std::max(statistic, 0.0), p, x.n_effective, y.n_effective};
}

Moments weighted_moments(const WeightedSample& sample)
{
    require_nonempty(sample, "weighted_moments");
    if (!(sample.n_effective > 1.0))
        throw DomainError("variance needs an effective sample size above one");
    if (sample.points.size() == 1)
        return Moments{sample.points.front(), 0.0};
    const double weight = sample.total_count();
    double mean = 0.0;
    for (std::size_t i = 0; i < sample.points.size(); ++i)
        mean += sample.counts[i] * sample.points[i];
    mean /= weight;
    double ss = 0.0;
    for (std::size_t i = 0; i < sample.points.size(); ++i)
    {
        const double dev = sample.points[i] - mean;
        ss += sample.counts[i] * dev * dev;
    }
    return Moments{mean, ss / (sample.n_effective - 1.0)};
}

TestResult f_test(const WeightedSample& x, const WeightedSample& y)
{
    require_nonempty(x, "f_test");
    require_nonempty(y, "f_test");
    if (x.n_effective <= 1.0 || y.n_effective <= 1.0)
        throw DegenerateVarianceError("f_test: sample too small for a variance");
    const auto mx = weighted_moments(x);
    const auto my = weighted_moments(y);
    if (mx.variance <= 0.0 || my.variance <= 0.0)
        throw DegenerateVarianceError("f_test: zero variance");
    const double f = mx.variance / my.variance;
    const double cdf = special::f_cdf(f, x.n_effective - 1.0, y.n_effective - 1.0);
    const double p = std::min(1.0, 2.0 * std::min(cdf, 1.0 - cdf));
    return TestResult{TestKind::f, f, p, x.n_effective, y.n_effective};
}

TestResult welch_test(const WeightedSample& x, const WeightedSample& y)
{
    require_nonempty(x, "welch_test");
    require_nonempty(y, "welch_test");
    if (x.n_effective <= 1.0 || y.n_effective <= 1.0)
        throw DegenerateVarianceError("welch_test: sample too small for a variance");
    const auto mx = weighted_moments(x);
    const auto my = weighted_moments(y);
    const double vx = mx.variance / x.n_effective;
    const double vy = my.variance / y.n_effective;
    const double se2 = vx + vy;
    if (!(se2 > 0.0))
        throw DegenerateVarianceError("welch_test: both variances are zero");
    const double t = (mx.mean - my.mean) / std::sqrt(se2);
    const double df = se2 * se2 / (vx * vx / (x.n_effective - 1.0) + vy * vy / (y.n_effective - 1.0));
    const double p = t == 0.0 ? 1.0 : special::student_t_two_sided(t, df);
    return TestResult{TestKind::welch, t, p, x.n_effective, y.n_effective};
}

TestResult run_test(TestKind kind, const WeightedSample& x, const WeightedSample& y)
{
    switch (kind)
    {
        case TestKind::ks:
            return ks_test(x, y);
        case TestKind::ad:
            return ad_test(x, y);
        case TestKind::welch:
            return welch_test(x, y);
        case TestKind::f:
            return f_test(x, y);
    }
    throw DomainError("unknown test kind");
}

double permutation_pvalue(
    const WeightedSample& x, const WeightedSample& y, const StatisticFn& statistic, int iterations, std::uint64_t seed)
{
    const auto xs = expand(x);
    const auto ys = expand(y);
    if (xs.empty() || ys.empty())
        throw DomainError("permutation_pvalue: empty sample after rounding counts");
    std::vector<double> pooled = xs;
    pooled.insert(pooled.end(), ys.begin(), ys.end());
    const std::size_t m = xs.size();
    const std::size_t total = pooled.size();

    const double observed = statistic(from_values(xs), from_values(ys));
    const double floor = observed - 1e-10 * std::max(1.0, std::fabs(observed));

    std::vector<double> left;
    std::vector<double> right;
    left.reserve(total);
    right.reserve(total);
    std::size_t extreme = 0;
    std::size_t trials = 0;

    if (total <= 10)
    {
        for (std::uint32_t mask = 0; mask < (1U << total); ++mask)
        {
            if (static_cast<std::size_t>(std::popcount(mask)) != m)
                continue;
            left.clear();
            right.clear();
            for (std::size_t i = 0; i < total; ++i)
                ((mask >> i) & 1U ? left : right).push_back(pooled[i]);
            ++trials;
            if (statistic(from_values(left), from_values(right)) >= floor)
                ++extreme;
        }
        return static_cast<double>(extreme) / static_cast<double>(trials);
    }

    if (iterations < 1)
        throw DomainError("permutation_pvalue: iterations must be positive");
    std::mt19937_64 rng(seed);
    for (int it = 0; it < iterations; ++it)
    {
        std::shuffle(pooled.begin(), pooled.end(), rng);
        left.assign(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(m));
        right.assign(pooled.begin() + static_cast<std::ptrdiff_t>(m), pooled.end());
        if (statistic(from_values(left), from_values(right)) >= floor)
            ++extreme;
    }
    return static_cast<double>(extreme) / static_cast<double>(iterations);
}

double null_distance(TestKind kind, double statistic)
{
    switch (kind)
    {
        case TestKind::ks:
        case TestKind::ad:
            return statistic;
        case TestKind::welch:
            return std::fabs(statistic);
        case TestKind::f:
            return std::fabs(std::log(statistic));
    }
    return statistic;
}

}
