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

// Lanes run over the regions of the last user; the other users are fixed per
// outer iteration. Per lane the arithmetic matches column_math exactly, only
// the summation order across columns differs.

#include "qsched/kernels/column_reduce.hpp"

#include <immintrin.h>

#pragma GCC diagnostic ignored "-Wignored-attributes"

#include <cstdint>
#include <limits>
#include <vector>

namespace qsched {

namespace {

double hsum(__m256d v)
{
    alignas(32) double t[4];
    _mm256_store_pd(t, v);
    return (t[0] + t[1]) + (t[2] + t[3]);
}

} // namespace

void reduce_channel_avx2(const ChannelTable &table, ScheduleMode mode, double eps, double tie_tol,
                         ChannelSums &out)
{
    const std::size_t M = table.users, L = table.regions;
    const std::size_t last = M - 1;
    const std::size_t Lp = (L + 3) & ~std::size_t(3);
    out.reset(M);

    // padded lanes carry zero probability and zero cost, rate and power
    std::vector<double> lc(Lp, 0.0), lr(Lp, 0.0), lpw(Lp, 0.0), lpr(Lp, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
        lc[l] = table.cost[last * L + l];
        lr[l] = table.rate[last * L + l];
        lpw[l] = table.power[last * L + l];
        lpr[l] = table.prob[last * L + l];
    }

    std::vector<__m256d> acc_rate(M, _mm256_setzero_pd()), acc_power(M, _mm256_setzero_pd());
    std::vector<__m256d> bc(M), br(M), bp(M), d(M), n2(M);
    __m256d acc_value = _mm256_setzero_pd();

    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vtol = _mm256_set1_pd(tie_tol);
    const __m256d sign = _mm256_set1_pd(-0.0);

    std::vector<std::uint32_t> idx(last, 0);
    std::size_t prefixes = 1;
    for (std::size_t m = 0; m < last; ++m)
        prefixes *= L;

    for (std::size_t j = 0; j < prefixes; ++j) {
        double P0 = 1.0;
        double pmin = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < last; ++m) {
            const std::size_t i = m * L + idx[m];
            P0 *= table.prob[i];
            pmin = std::min(pmin, table.cost[i]);
            bc[m] = _mm256_set1_pd(table.cost[i]);
            br[m] = _mm256_set1_pd(table.rate[i]);
            bp[m] = _mm256_set1_pd(table.power[i]);
        }
        const __m256d vP0 = _mm256_set1_pd(P0);
        const __m256d vpmin = _mm256_set1_pd(pmin);

        for (std::size_t b = 0; b < Lp; b += 4) {
            bc[last] = _mm256_loadu_pd(&lc[b]);
            br[last] = _mm256_loadu_pd(&lr[b]);
            bp[last] = _mm256_loadu_pd(&lpw[b]);
            const __m256d P = _mm256_mul_pd(vP0, _mm256_loadu_pd(&lpr[b]));
            const __m256d cstar = _mm256_min_pd(vpmin, bc[last]);
            const __m256d active = _mm256_cmp_pd(cstar, zero, _CMP_LT_OQ);

            if (mode == ScheduleMode::hard) {
                acc_value = _mm256_add_pd(acc_value, _mm256_mul_pd(P, _mm256_min_pd(cstar, zero)));
                const __m256d thr = _mm256_add_pd(cstar, _mm256_mul_pd(vtol, _mm256_andnot_pd(sign, cstar)));
                __m256d open = active;
                for (std::size_t m = 0; m < M; ++m) {
                    const __m256d win = _mm256_and_pd(_mm256_cmp_pd(bc[m], thr, _CMP_LE_OQ), open);
                    open = _mm256_andnot_pd(win, open);
                    const __m256d Pm = _mm256_and_pd(P, win);
                    acc_rate[m] = _mm256_add_pd(acc_rate[m], _mm256_mul_pd(Pm, br[m]));
                    acc_power[m] = _mm256_add_pd(acc_power[m], _mm256_mul_pd(Pm, bp[m]));
                }
                continue;
            }

            __m256d sum = zero;
            for (std::size_t m = 0; m < M; ++m) {
                d[m] = _mm256_sub_pd(bc[m], cstar);
                const __m256d in = _mm256_and_pd(_mm256_cmp_pd(d[m], veps, _CMP_LT_OQ), active);
                const __m256d n = _mm256_sub_pd(one, _mm256_div_pd(d[m], veps));
                n2[m] = _mm256_and_pd(_mm256_mul_pd(n, n), in);
                sum = _mm256_add_pd(sum, n2[m]);
            }
            const __m256d safe = _mm256_blendv_pd(one, sum, active);
            __m256d excess = zero;
            for (std::size_t m = 0; m < M; ++m) {
                const __m256d w = _mm256_div_pd(n2[m], safe);
                const __m256d pw = _mm256_mul_pd(P, w);
                acc_rate[m] = _mm256_add_pd(acc_rate[m], _mm256_mul_pd(pw, br[m]));
                acc_power[m] = _mm256_add_pd(acc_power[m], _mm256_mul_pd(pw, bp[m]));
                excess = _mm256_add_pd(excess, _mm256_mul_pd(d[m], w));
            }
            const __m256d v = _mm256_mul_pd(P, _mm256_add_pd(cstar, excess));
            acc_value = _mm256_add_pd(acc_value, _mm256_and_pd(v, active));
        }

        for (std::size_t m = last; m-- > 0;) {
            if (++idx[m] < L)
                break;
            idx[m] = 0;
        }
    }

    out.value = hsum(acc_value);
    for (std::size_t m = 0; m < M; ++m) {
        out.rate[m] = hsum(acc_rate[m]);
        out.power[m] = hsum(acc_power[m]);
    }
}

} // namespace qsched
