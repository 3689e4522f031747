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

#include "qsched/errors.hpp"
#include "qsched/kernels/column_reduce.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include <fmt/core.h>

namespace qsched {

namespace {

KernelIsa detect()
{
    const char *env = std::getenv("QSCHED_ISA");
    if (env != nullptr && std::strcmp(env, "scalar") == 0)
        return KernelIsa::scalar;
    return isa_available(KernelIsa::avx2) ? KernelIsa::avx2 : KernelIsa::scalar;
}

std::atomic<int> &forced()
{
    static std::atomic<int> f{-1};
    return f;
}

} // namespace

bool isa_available(KernelIsa isa)
{
    if (isa == KernelIsa::scalar)
        return true;
#if defined(QSCHED_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

KernelIsa active_isa()
{
    const int f = forced().load();
    if (f >= 0)
        return static_cast<KernelIsa>(f);
    static const KernelIsa detected = detect();
    return detected;
}

void force_isa(KernelIsa isa)
{
    if (!isa_available(isa))
        throw ConfigError(fmt::format("kernel ISA {} is not available", isa_name(isa)));
    forced().store(static_cast<int>(isa));
}

void reset_isa()
{
    forced().store(-1);
}

std::string_view isa_name(KernelIsa isa)
{
    return isa == KernelIsa::avx2 ? "avx2" : "scalar";
}

void reduce_channel(const ChannelTable &table, ScheduleMode mode, double eps, double tie_tol, ChannelSums &out)
{
#if defined(QSCHED_HAVE_AVX2)
    if (active_isa() == KernelIsa::avx2) {
        reduce_channel_avx2(table, mode, eps, tie_tol, out);
        return;
    }
#endif
    reduce_channel_scalar(table, mode, eps, tie_tol, out);
}

} // namespace qsched
