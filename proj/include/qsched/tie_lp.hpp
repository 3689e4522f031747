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
#include "qsched/quantizer.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qsched {

// A column whose minimum cost is shared by several users.
struct TieInstance {
    std::size_t channel = 0;            // representative channel index
    std::vector<std::uint32_t> column;
    double prob = 0.0;                  // column probability times channel multiplicity
    std::vector<std::uint32_t> members; // tied users, increasing
    std::vector<double> rate;           // R* of each member
    std::vector<double> power;          // P(R*) of each member
};

// Time-sharing problem over all tied columns: choose weights w >= 0 with
// sum 1 per column so that every user reaches its target, at minimum
// weighted power. Columns with a single winner are folded into the
// per-user base rate and power.
struct TieProblem {
    std::vector<double> mu;
    std::vector<double> targets;
    std::vector<double> base_rate;
    std::vector<double> base_power;
    std::vector<TieInstance> instances;
};

struct TieSolution {
    std::vector<std::vector<double>> weights; // per instance, aligned with members
    std::vector<double> rate;                 // per-user average rate after sharing
    std::vector<double> power;                // per-user average power after sharing
    double weighted_power = 0.0;              // sum_m mu_m * power_m
    std::vector<std::size_t> dropped_rows;    // users with no tie and a met target
    std::size_t iterations = 0;
};

// Users within tie_gap (absolute cost) of a negative column minimum are tied.
// tables[i] describes a channel class that occurs multiplicity[i] times.
TieProblem collect_ties(const std::vector<ChannelTable> &tables, const std::vector<double> &multiplicity,
                        const std::vector<double> &mu, const std::vector<double> &targets, double tie_gap,
                        std::size_t budget = kDefaultEnumerationBudget);

// Throws InfeasibleError when the targets cannot be met by any sharing.
TieSolution solve_tie_lp(const TieProblem &problem, double tol = 1e-9);

} // namespace qsched
