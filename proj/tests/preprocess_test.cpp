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
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include <colmatch/error.hpp>
#include <colmatch/preprocess.hpp>

namespace colmatch
{
namespace
{

TEST(PreprocessTest, QuartileExamples)
{
    const auto constant = quartiles(std::vector<double>{5, 5, 5, 5});
    EXPECT_EQ(constant.q1, 5);
    EXPECT_EQ(constant.q3, 5);
    EXPECT_EQ(constant.iqr, 0);

    // h = 1.0 and h = 3.0 land on the 2nd and 4th order statistics.
    const auto q = quartiles(std::vector<double>{1, 2, 3, 4, 100});
    EXPECT_DOUBLE_EQ(q.q1, 2);
    EXPECT_DOUBLE_EQ(q.q3, 4);
    EXPECT_DOUBLE_EQ(q.lower_fence, -1);
    EXPECT_DOUBLE_EQ(q.upper_fence, 7);

    // h = 0.25 and h = 0.75 interpolate between 1 and 3.
    const auto two = quartiles(std::vector<double>{3, 1});
    EXPECT_DOUBLE_EQ(two.q1, 1.5);
    EXPECT_DOUBLE_EQ(two.q3, 2.5);

    EXPECT_THROW(quartiles(std::vector<double>{}), DomainError);
}

TEST(PreprocessTest, OutlierExamples)
{
    EXPECT_EQ(remove_outliers_iqr(std::vector<double>{1, 2, 3}).values, (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(remove_outliers_iqr(std::vector<double>{1, 2, 3, 4, 100}).values, (std::vector<double>{1, 2, 3, 4}));
    EXPECT_EQ(remove_outliers_iqr(std::vector<double>{5, 5, 5, 5, 9}).values, (std::vector<double>{5, 5, 5, 5}));
    EXPECT_THROW(remove_outliers_iqr(std::vector<double>{}), DomainError);
}

TEST(PreprocessTest, OutlierFilterIsSinglePass)
{
    // A second pass would trim 12 as well.
    const std::vector<double> v{0, 12, 25, 26, 27, 28, 30, 30};
    const auto once = remove_outliers_iqr(v).values;
    EXPECT_EQ(once, (std::vector<double>{12, 25, 26, 27, 28, 30, 30}));
    EXPECT_NE(remove_outliers_iqr(once).values, once);
}

TEST(PreprocessTest, FactorMustBePositive)
{
    EXPECT_THROW(remove_outliers_iqr(std::vector<double>{1, 2, 3, 4}, 0.0), DomainError);
    EXPECT_FALSE(remove_outliers_iqr(std::vector<double>{1, 2, 3, 4}).all_removed);
}

TEST(PreprocessTest, SharedEdgeExamples)
{
    const auto e = shared_edges(std::vector<double>{0, 5}, std::vector<double>{5, 10}, 10);
    ASSERT_EQ(e.size(), 11u);
    for (int i = 0; i <= 10; ++i)
        EXPECT_DOUBLE_EQ(e[i], i);
    EXPECT_EQ(shared_edges(std::vector<double>{3}, std::vector<double>{3}, 7), (std::vector<double>{3, 4}));
    EXPECT_EQ(shared_edges(std::vector<double>{0, 1}, std::vector<double>{0, 1}, 2), (std::vector<double>{0, 0.5, 1}));
    EXPECT_THROW(shared_edges(std::vector<double>{}, std::vector<double>{1}, 2), DomainError);
}

TEST(PreprocessTest, HistogramExamples)
{
    std::vector<double> edges(11);
    std::iota(edges.begin(), edges.end(), 0.0);
    std::vector<double> mids;
    for (int i = 0; i < 10; ++i)
        mids.push_back(i + 0.5);
    EXPECT_EQ(build_histogram(mids, edges).counts, std::vector<std::size_t>(10, 1));

    const auto last = build_histogram(std::vector<double>{10}, edges);
    EXPECT_EQ(last.counts.back(), 1u);

    const auto h = build_histogram(std::vector<double>{0, 0, 5}, std::vector<double>{0, 5, 10});
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 1}));
    EXPECT_EQ(h.total, 3u);

    EXPECT_THROW(build_histogram(std::vector<double>{1}, std::vector<double>{0, 0}), DomainError);
    EXPECT_THROW(build_histogram(std::vector<double>{1}, std::vector<double>{2, 1}), DomainError);
}

TEST(PreprocessTest, OutOfRangeValuesAreClamped)
{
    const auto h = build_histogram(std::vector<double>{-100, 0.5, 1.5, 1e9}, std::vector<double>{0, 1, 2});
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 2}));
}

Histogram counts_histogram(std::vector<std::size_t> counts)
{
    Histogram h;
    h.edges.resize(counts.size() + 1);
    std::iota(h.edges.begin(), h.edges.end(), 0.0);
    h.total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    h.counts = std::move(counts);
    return h;
}

TEST(PreprocessTest, NormalizeExamples)
{
    EXPECT_EQ(*normalize_histogram(counts_histogram({2, 2, 4})).normalized, (std::vector<double>{0.25, 0.25, 0.5}));
    EXPECT_EQ(*normalize_histogram(counts_histogram({3})).normalized, (std::vector<double>{1.0}));
    EXPECT_EQ(*normalize_histogram(counts_histogram({0, 4})).normalized, (std::vector<double>{0, 1}));
    EXPECT_THROW(normalize_histogram(counts_histogram({0, 0})), DomainError);
    const auto n = normalize_histogram(counts_histogram({2, 2, 4}));
    EXPECT_EQ(n.counts, (std::vector<std::size_t>{2, 2, 4}));
    EXPECT_EQ(n.total, 8u);
}

TEST(PreprocessTest, PoolExamples)
{
    const std::vector<Histogram> opposite{normalize_histogram(counts_histogram({1, 0})), normalize_histogram(counts_histogram({0, 3}))};
    const auto pooled = pool_years(opposite);
    EXPECT_EQ(*pooled.normalized, (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(pooled.years, 2u);
    EXPECT_EQ(pooled.total, 4u);

    const std::vector<Histogram> single{normalize_histogram(counts_histogram({1, 3}))};
    EXPECT_EQ(pool_years(single), single[0]);

    const std::vector<Histogram> halves{normalize_histogram(counts_histogram({2, 2})), normalize_histogram(counts_histogram({5, 5}))};
    EXPECT_EQ(*pool_years(halves).normalized, (std::vector<double>{0.5, 0.5}));

    auto shifted = normalize_histogram(counts_histogram({1, 1}));
    shifted.edges = {0, 1, 3};
    const std::vector<Histogram> mismatched{normalize_histogram(counts_histogram({1, 1})), shifted};
    EXPECT_THROW(pool_years(mismatched), DomainError);
}

class PreprocessProperty : public ::testing::TestWithParam<int>
{
};

TEST_P(PreprocessProperty, Invariants)
{
    std::mt19937_64 rng(GetParam());
    std::normal_distribution<double> dist(0.0, 3.0);
    std::vector<double> v(1 + rng() % 60);
    for (auto& x : v)
        x = dist(rng);
    if (rng() % 3 == 0)
        v.push_back(100.0);

    // Filter output is an order-preserving subsequence within the input fences.
    const auto q = quartiles(v);
    EXPECT_LE(q.q1, q.q3);
    const auto kept = remove_outliers_iqr(v).values;
    std::size_t cursor = 0;
    for (const double x : kept)
    {
        EXPECT_GE(x, q.lower_fence);
        EXPECT_LE(x, q.upper_fence);
        while (cursor < v.size() && v[cursor] != x)
            ++cursor;
        ASSERT_LT(cursor, v.size());
        ++cursor;
    }

    // Affine equivariance of quartiles and fences.
    const double a = 0.5 + static_cast<double>(rng() % 100) / 10.0;
    const double b = static_cast<double>(rng() % 200) - 100.0;
    std::vector<double> w;
    for (const double x : v)
        w.push_back(a * x + b);
    const auto qw = quartiles(w);
    const double tol = 1e-9 * (1.0 + std::fabs(b) + a * 100.0);
    EXPECT_NEAR(qw.q1, a * q.q1 + b, tol);
    EXPECT_NEAR(qw.q3, a * q.q3 + b, tol);
    EXPECT_NEAR(qw.lower_fence, a * q.lower_fence + b, tol);
    EXPECT_NEAR(qw.upper_fence, a * q.upper_fence + b, tol);

    // Mass conservation, even for values outside the edges.
    const auto edges = shared_edges(v, std::vector<double>{0.0}, 1 + static_cast<int>(rng() % 12));
    std::vector<double> wide = v;
    wide.push_back(edges.front() - 5.0);
    wide.push_back(edges.back() + 5.0);
    const auto h = build_histogram(wide, edges);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), wide.size());
    EXPECT_EQ(h.total, wide.size());

    // Normalized weights equal count / total and sum to one.
    const auto n = normalize_histogram(h);
    double sum = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i)
    {
        EXPECT_DOUBLE_EQ((*n.normalized)[i], static_cast<double>(h.counts[i]) / static_cast<double>(h.total));
        sum += (*n.normalized)[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);

    // Pooling identical histograms leaves the weights unchanged.
    const std::vector<Histogram> copies(2 + rng() % 4, n);
    const auto pooled = pool_years(copies);
    for (std::size_t i = 0; i < h.bins(); ++i)
        EXPECT_NEAR((*pooled.normalized)[i], (*n.normalized)[i], 1e-15);

    // Permutation invariance of quartiles and histogram.
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(quartiles(shuffled).q1, q.q1);
    EXPECT_EQ(quartiles(shuffled).q3, q.q3);
    EXPECT_EQ(build_histogram(shuffled, edges).counts, build_histogram(v, edges).counts);
}

INSTANTIATE_TEST_SUITE_P(RandomSamples, PreprocessProperty, ::testing::Range(0, 40));

}
}
