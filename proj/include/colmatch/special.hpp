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

namespace colmatch::special
{

/// I_z(a, b), the regularized incomplete beta function. Continued fraction (modified Lentz),
/// evaluated on the side of z = (a + 1) / (a + b + 2) where it converges fastest.
double regularized_incomplete_beta(double a, double b, double z);

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), Q(0) = 1.
double ks_survival(double lambda);

/// P(T <= t) for Student's t with `df` degrees of freedom (df may be fractional).
double student_t_cdf(double t, double df);

/// Two-sided Student-t tail probability P(|T| >= |t|).
double student_t_two_sided(double t, double df);

/// P(F <= f) for the F distribution with (d1, d2) degrees of freedom.
double f_cdf(double f, double d1, double d2);

/// Limiting CDF of the Anderson-Darling statistic (Marsaglia & Marsaglia approximation, |error| < 2e-6).
double anderson_darling_limit_cdf(double z);

}
