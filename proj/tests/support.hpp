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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <colmatch/evalbench.hpp>
#include <colmatch/ingest.hpp>

/// Oracles and fixtures shared by the unit tests and the acceptance binary. The oracles are written
/// straight from the textbook definitions and share no code with the library.
namespace colmatch::testing
{

/// Empirical-CDF gap evaluated at every pooled value by direct counting.
inline double brute_ks(const std::vector<double>& x, const std::vector<double>& y)
{
    const double m = static_cast<double>(x.size());
    const double n = static_cast<double>(y.size());
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    double d = 0.0;
    for (const double t : pooled)
    {
        double cx = 0.0;
        double cy = 0.0;
        for (const double v : x)
            cx += v <= t ? 1.0 : 0.0;
        for (const double v : y)
            cy += v <= t ? 1.0 : 0.0;
        d = std::max(d, std::fabs(cx / m - cy / n));
    }
    return d;
}

/// Two-sample A^2 for tie-free samples: 1/(N m n) sum_{j<N} [(N X_j - j m)^2 + (N Y_j - j n)^2] / (j (N - j)),
/// with X_j, Y_j the number of x and y among the j smallest pooled values.
inline double direct_ad(const std::vector<double>& x, const std::vector<double>& y)
{
    struct Tagged
    {
        double value;
        bool from_x;
    };
    std::vector<Tagged> pooled;
    for (const double v : x)
        pooled.push_back({v, true});
    for (const double v : y)
        pooled.push_back({v, false});
    std::ranges::sort(pooled, {}, &Tagged::value);
    const double m = static_cast<double>(x.size());
    const double n = static_cast<double>(y.size());
    const double N = m + n;
    double xj = 0.0;
    double yj = 0.0;
    double sum = 0.0;
    for (std::size_t j = 1; j < pooled.size(); ++j)
    {
        (pooled[j - 1].from_x ? xj : yj) += 1.0;
        const double jj = static_cast<double>(j);
        const double a = N * xj - jj * m;
        const double b = N * yj - jj * n;
        sum += (a * a + b * b) / (jj * (N - jj));
    }
    return sum / (N * m * n);
}

/// Q(lambda) = 2 sum_{k=1}^{terms} (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double series_ks_survival(double lambda, int terms = 100)
{
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k)
        sum += (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return 2.0 * sum;
}

/// Simpson-rule integral of t^(a-1) (1-t)^(b-1) over [0, z] divided by the full integral (a, b >= 1).
inline double numeric_incomplete_beta(double a, double b, double z, int steps = 20000)
{
    const auto integrate = [&](double upper)
    {
        const double h = upper / steps;
        const auto f = [&](double t) { return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0); };
        double s = f(0.0) + f(upper);
        for (int i = 1; i < steps; ++i)
            s += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    return integrate(z) / integrate(1.0);
}

inline double sample_mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (const double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v)
{
    const double mean = sample_mean(v);
    double s = 0.0;
    for (const double x : v)
        s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

inline std::vector<double> normal_sample(std::mt19937_64& rng, std::size_t n, double mean, double sd)
{
    std::normal_distribution<double> dist(mean, sd);
    std::vector<double> out(n);
    for (auto& v : out)
        v = dist(rng);
    return out;
}

inline ColumnSpec normal_column(const std::string& name, double mean, double sd = 1.0)
{
    return ColumnSpec{name, Family::normal, {mean, sd}};
}

/// One release pair over ten well separated Gaussians: two renames, two additions and one removal.
inline SyntheticSpec soundness_spec(std::uint64_t seed = 42)
{
    SyntheticSpec spec;
    spec.years = 2;
    spec.seed = seed;
    spec.rows_per_year = 1000;
    spec.first_release = 2007;
    for (int i = 0; i < 10; ++i)
        spec.columns.push_back(normal_column("c" + std::to_string(i), 10.0 * i));
    spec.mutations.push_back(Mutation{2, MutationOp::rename, "c1", "r1", std::nullopt, 0.0});
    spec.mutations.push_back(Mutation{2, MutationOp::rename, "c2", "r2", std::nullopt, 0.0});
    spec.mutations.push_back(Mutation{2, MutationOp::add, "a1", "", normal_column("a1", 200.0), 0.0});
    spec.mutations.push_back(Mutation{2, MutationOp::add, "a2", "", normal_column("a2", 250.0), 0.0});
    spec.mutations.push_back(Mutation{2, MutationOp::remove, "c9", "", std::nullopt, 0.0});
    return spec;
}

/// Six releases of six Gaussians three standard deviations apart, every column drifting by one
/// standard deviation per release, plus a rename, an addition and a removal along the way.
inline SyntheticSpec drift_spec(std::uint64_t seed = 7)
{
    SyntheticSpec spec;
    spec.years = 6;
    spec.seed = seed;
    spec.rows_per_year = 1000;
    spec.first_release = 2007;
    for (int i = 0; i < 6; ++i)
        spec.columns.push_back(normal_column("d" + std::to_string(i), 3.0 * i));
    for (int year = 2; year <= 6; ++year)
        for (int i = 0; i < 6; ++i)
            spec.mutations.push_back(Mutation{year, MutationOp::drift, "d" + std::to_string(i), "", std::nullopt, 1.0});
    // Renamed columns keep drifting under their new name.
    spec.mutations.push_back(Mutation{3, MutationOp::rename, "d2", "e2", std::nullopt, 0.0});
    for (auto& m : spec.mutations)
        if (m.year > 3 && m.column == "d2")
            m.column = "e2";
    spec.mutations.push_back(Mutation{4, MutationOp::add, "n1", "", normal_column("n1", 40.0), 0.0});
    spec.mutations.push_back(Mutation{5, MutationOp::remove, "d5", "", std::nullopt, 0.0});
    std::erase_if(spec.mutations, [](const Mutation& m) { return m.op == MutationOp::drift && m.column == "d5" && m.year >= 5; });
    return spec;
}

/// Mixed families with partly overlapping distributions, so rankings are genuinely contested.
inline SyntheticSpec mixed_spec(std::uint64_t seed)
{
    SyntheticSpec spec;
    spec.years = 4;
    spec.seed = seed;
    spec.rows_per_year = 600;
    spec.first_release = 2007;
    spec.columns = {
        {"u", Family::uniform, {0.0, 10.0}},
        {"g1", Family::normal, {5.0, 2.0}},
        {"g2", Family::normal, {6.0, 2.5}},
        {"ln", Family::lognormal, {1.0, 0.5}},
        {"po", Family::poisson, {4.0}},
        {"po2", Family::poisson, {5.0}},
    };
    spec.mutations.push_back(Mutation{2, MutationOp::rename, "g1", "gauss", std::nullopt, 0.0});
    spec.mutations.push_back(Mutation{3, MutationOp::add, "extra", "", ColumnSpec{"extra", Family::uniform, {2.0, 8.0}}, 0.0});
    spec.mutations.push_back(Mutation{3, MutationOp::remove, "po2", "", std::nullopt, 0.0});
    spec.mutations.push_back(Mutation{4, MutationOp::drift, "u", "", std::nullopt, 0.5});
    return spec;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag)
{
    static std::mt19937_64 rng(std::random_device{}());
    auto dir = std::filesystem::temp_directory_path() / ("colmatch-" + tag + "-" + std::to_string(rng() % 1000000007ULL));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}


/// Writes 2018.csv (num_salas, idade, nota) and 2019.csv (qt_salas, idade, nota, qtde_tablet) into dir.
/// The renamed pair shares its distribution; qtde_tablet is far from everything else.
inline void write_review_pair(const std::filesystem::path& dir, std::uint64_t seed = 11)
{
    std::mt19937_64 rng(seed);
    const auto write = [&](const std::filesystem::path& path, const std::vector<std::string>& names, const std::vector<std::vector<double>>& cols)
    {
        std::ofstream out(path);
        for (std::size_t c = 0; c < names.size(); ++c)
            out << (c ? "," : "") << names[c];
        out << '\n';
        for (std::size_t r = 0; r < cols[0].size(); ++r)
        {
            for (std::size_t c = 0; c < cols.size(); ++c)
                out << (c ? "," : "") << cols[c][r];
            out << '\n';
        }
    };
    write(dir / "2018.csv", {"num_salas", "idade", "nota"},
          {normal_sample(rng, 400, 10, 1), normal_sample(rng, 400, 40, 3), normal_sample(rng, 400, 70, 2)});
    write(dir / "2019.csv", {"qt_salas", "idade", "nota", "qtde_tablet"},
          {normal_sample(rng, 400, 10, 1), normal_sample(rng, 400, 40, 3), normal_sample(rng, 400, 70, 2),
           normal_sample(rng, 400, 500, 5)});
}

}
