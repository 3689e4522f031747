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

#include "qsched/kernels/column_reduce.hpp"
#include "qsched/kernels/column_math.hpp"

#include <cstdint>

namespace qsched {

void ChannelSums::reset(std::size_t users)
{
    value = 0.0;
    rate.assign(users, 0.0);
    power.assign(users, 0.0);
}

void reduce_channel_scalar(const ChannelTable &table, ScheduleMode mode, double eps, double tie_tol,
                           ChannelSums &out)
{
    const std::size_t M = table.users, L = table.regions;
    out.reset(M);
    std::vector<std::uint32_t> col(M, 0);
    std::vector<double> c(M), r(M), p(M), scratch(M);

    std::size_t count = 1;
    for (std::size_t m = 0; m < M; ++m)
        count *= L;

    for (std::size_t j = 0; j < count; ++j) {
        double P = 1.0;
        for (std::size_t m = 0; m < M; ++m)
            P *= table.prob[m * L + col[m]];
        table.gather(col, c.data(), r.data(), p.data());
        if (mode == ScheduleMode::hard)
            column_math::accumulate_hard(c.data(), r.data(), p.data(), M, P, tie_tol, out.value, out.rate.data(),
                                         out.power.data());
        else
            column_math::accumulate_smooth(c.data(), r.data(), p.data(), M, P, eps, out.value, out.rate.data(),
                                           out.power.data(), scratch.data());

        for (std::size_t m = M; m-- > 0;) {
            if (++col[m] < L)
                break;
            col[m] = 0;
        }
    }
}

} // namespace qsched
