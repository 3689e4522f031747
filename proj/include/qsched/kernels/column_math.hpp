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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace qsched {

// Costs within this relative distance of the minimum count as tied.
inline constexpr double kTieTolerance = 1e-9;

namespace column_math {

inline double min_cost(const double *cost, std::size_t M)
{
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < M; ++m)
        c = std::min(c, cost[m]);
    return c;
}

// Hard rule: the lowest-index user within tie_tol of the minimum cost takes
// the channel, provided the minimum is negative. Returns M when idle.
inline std::size_t hard_winner(const double *cost, std::size_t M, double cstar, double tie_tol)
{
    if (!(cstar < 0.0))
        return M;
    const double thr = cstar + tie_tol * std::abs(cstar);
    for (std::size_t m = 0; m < M; ++m)
        if (cost[m] <= thr)
            return m;
    return M;
}

// Smooth rule: weights proportional to (1 - (C_m - c*)/eps)^2 over users
// within eps of the minimum. n2 receives the unnormalized weights; returns
// their sum (0 when idle).
inline double smooth_raw_weights(const double *cost, std::size_t M, double cstar, double eps, double *n2)
{
    double sum = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        n2[m] = 0.0;
        if (!(cstar < 0.0))
            continue;
        const double d = cost[m] - cstar;
        if (d < eps) {
            const double n = 1.0 - d / eps;
            n2[m] = n * n;
            sum += n2[m];
        }
    }
    return sum;
}

// Adds P * (contribution of one column) under the hard rule.
inline void accumulate_hard(const double *cost, const double *rate, const double *power, std::size_t M,
                            double P, double tie_tol, double &value, double *acc_rate, double *acc_power)
{
    const double cstar = min_cost(cost, M);
    value += P * std::min(cstar, 0.0);
    const std::size_t w = hard_winner(cost, M, cstar, tie_tol);
    if (w == M)
        return;
    acc_rate[w] += P * rate[w];
    acc_power[w] += P * power[w];
}

// Adds P * (contribution of one column) under the smooth rule. The value is
// accumulated as c* + sum (C_m - c*) w_m so it never falls below the hard value.
inline void accumulate_smooth(const double *cost, const double *rate, const double *power, std::size_t M,
                              double P, double eps, double &value, double *acc_rate, double *acc_power,
                              double *scratch)
{
    const double cstar = min_cost(cost, M);
    if (!(cstar < 0.0))
        return;
    const double sum = smooth_raw_weights(cost, M, cstar, eps, scratch);
    double excess = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        if (scratch[m] == 0.0)
            continue;
        const double w = scratch[m] / sum;
        const double pw = P * w;
        acc_rate[m] += pw * rate[m];
        acc_power[m] += pw * power[m];
        excess += (cost[m] - cstar) * w;
    }
    value += P * (cstar + excess);
}

} // namespace column_math
} // namespace qsched
