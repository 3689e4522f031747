// SPDX-License-Identifier: Apache-2.0
//
// qsched: channel scheduling and power allocation with quantized CSI
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "qsched/special_functions.hpp"
#include "qsched/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

namespace qsched {

namespace {

constexpr double kTol = 1e-15;
constexpr int kMaxTerms = 500;

// E1(x) for 0 < x < 1 by the alternating power series.
double e1_series(double x)
{
    double sum = 0.0, term = 1.0;
    for (int n = 1; n <= kMaxTerms; ++n) {
        term *= -x / n;
        const double add = term / n;
        sum += add;
        if (std::abs(add) < kTol * std::abs(sum))
            return -std::numbers::egamma - std::log(x) - sum;
    }
    throw NumericError(fmt::format("E1 series did not converge at x = {}", x), std::abs(term));
}

// e^x E1(x) for x >= 1 by modified Lentz on the continued fraction.
double e1s_continued_fraction(double x)
{
    constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxTerms; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kTol)
            return h;
    }
    throw NumericError(fmt::format("E1 continued fraction did not converge at x = {}", x), h);
}

} // namespace

double expint_e1(double x)
{
    if (!(x > 0.0))
        throw NumericError(fmt::format("E1 needs x > 0, got {}", x), x);
    if (x < 1.0)
        return e1_series(x);
    return std::exp(-x) * e1s_continued_fraction(x);
}

double expint_e1_scaled(double x)
{
    if (!(x > 0.0))
        throw NumericError(fmt::format("scaled E1 needs x > 0, got {}", x), x);
    if (x == std::numeric_limits<double>::infinity())
        return 0.0;
    if (x < 1.0)
        return std::exp(x) * e1_series(x);
    return e1s_continued_fraction(x);
}

double truncated_exp_series(unsigned n, double x)
{
    double sum = 1.0, term = 1.0;
    for (unsigned i = 1; i <= n; ++i) {
        term *= x / i;
        sum += term;
    }
    return sum;
}

} // namespace qsched
