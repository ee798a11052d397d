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
#include <colmatch/special.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <colmatch/error.hpp>

namespace colmatch::special
{
namespace
{

constexpr int max_cf_iterations = 200000;
constexpr double cf_epsilon = 1e-16;
constexpr double tiny = 1e-300;

double beta_continued_fraction(double a, double b, double z)
{
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * z / qap;
    if (std::fabs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_cf_iterations; ++m)
    {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < cf_epsilon)
            return h;
    }
    return h;
}

}

double regularized_incomplete_beta(double a, double b, double z)
{
    if (!(a > 0.0) || !(b > 0.0) || !(z >= 0.0 && z <= 1.0))
        throw DomainError("incomplete beta: need a > 0, b > 0 and 0 <= z <= 1");
    if (z == 0.0)
        return 0.0;
    if (z == 1.0)
        return 1.0;
    const double log_front
        = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(z) + b * std::log1p(-z);
    const double front = std::exp(log_front);
    double result;
    if (z < (a + 1.0) / (a + b + 2.0))
        result = front * beta_continued_fraction(a, b, z) / a;
    else
        result = 1.0 - front * beta_continued_fraction(b, a, 1.0 - z) / b;
    return std::clamp(result, 0.0, 1.0);
}

double ks_survival(double lambda)
{
    if (!(lambda >= 0.0))
        throw DomainError("ks_survival: lambda must be nonnegative");
    if (lambda == 0.0)
        return 1.0;
    // The alternating series converges slowly for small lambda; the Jacobi theta form is used there.
    if (lambda < 1.0)
    {
        const double pi2 = std::numbers::pi * std::numbers::pi;
        const double inv = 1.0 / (lambda * lambda);
        double sum = 0.0;
        for (int k = 1; k < 100; ++k)
        {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * pi2 * inv / 8.0);
            sum += term;
            if (term < 1e-18 * sum)
                break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k < 200; ++k)
    {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term <= 1e-18 * std::fabs(sum) || term == 0.0)
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double student_t_cdf(double t, double df)
{
    if (!(df > 0.0))
        throw DomainError("student_t_cdf: df must be positive");
    if (std::isinf(t))
        return t > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided(double t, double df)
{
    if (!(df > 0.0))
        throw DomainError("student_t_two_sided: df must be positive");
    if (std::isinf(t))
        return 0.0;
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double f_cdf(double f, double d1, double d2)
{
    if (!(d1 > 0.0) || !(d2 > 0.0))
        throw DomainError("f_cdf: degrees of freedom must be positive");
    if (f <= 0.0)
        return 0.0;
    if (std::isinf(f))
        return 1.0;
    return regularized_incomplete_beta(d1 / 2.0, d2 / 2.0, d1 * f / (d1 * f + d2));
}

double anderson_darling_limit_cdf(double z)
{
    if (z <= 0.0)
        return 0.0;
    if (z < 2.0)
    {
        return std::exp(-1.2337141 / z) / std::sqrt(z)
            * (2.00012
               + (.247105 - (.0649821 - (.0347962 - (.0116720 - .00168691 * z) * z) * z) * z) * z);
    }
    return std::exp(-std::exp(1.0776 - (2.30695 - (.43424 - (.082433 - (.008056 - .0003146 * z) * z) * z) * z) * z));
}

}
