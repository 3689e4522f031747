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

#include "qsched/allocator.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace qsched {

enum class ScheduleMode { hard, smooth };

enum class KernelIsa { scalar, avx2 };

// Probability-weighted sums over all L^M columns of one channel:
//   value    = sum_j Pr(j) * (per-column dual contribution)
//   rate[m]  = sum_j Pr(j) * w_m(j) * R_m(j)
//   power[m] = sum_j Pr(j) * w_m(j) * P_m(j)
struct ChannelSums {
    double value = 0.0;
    std::vector<double> rate;
    std::vector<double> power;

    void reset(std::size_t users);
};

// Dispatches to the active kernel. The caller checks the enumeration budget.
void reduce_channel(const ChannelTable &table, ScheduleMode mode, double eps, double tie_tol,
                    ChannelSums &out);

void reduce_channel_scalar(const ChannelTable &table, ScheduleMode mode, double eps, double tie_tol,
                           ChannelSums &out);

#if defined(QSCHED_HAVE_AVX2)
void reduce_channel_avx2(const ChannelTable &table, ScheduleMode mode, double eps, double tie_tol,
                         ChannelSums &out);
#endif

bool isa_available(KernelIsa isa);

// Kernel used by reduce_channel. Defaults to the widest available ISA; the
// environment variable QSCHED_ISA=scalar forces the reference kernel.
KernelIsa active_isa();

// Throws ConfigError if the ISA is not available on this machine.
void force_isa(KernelIsa isa);
void reset_isa();

std::string_view isa_name(KernelIsa isa);

} // namespace qsched
