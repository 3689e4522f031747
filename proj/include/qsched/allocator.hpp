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

#include "qsched/kernels/column_math.hpp"
#include "qsched/powerrate.hpp"
#include "qsched/quantizer.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qsched {

// Rate multipliers lambda (one per user), power weights mu and rate targets.
struct Multipliers {
    std::vector<double> lambda;
    std::vector<double> mu;
    std::vector<double> targets;

    std::size_t users() const noexcept { return lambda.size(); }
    // Throws ConfigError on size mismatch, negative lambda or non-positive mu.
    void validate() const;
};

// Region curves and region probabilities of every user on one channel.
class ChannelCurves {
public:
    ChannelCurves(const PowerRateModel &model, const QuantizerGrid &grid, std::size_t channel);

    std::size_t users() const noexcept { return users_; }
    std::size_t regions() const noexcept { return regions_; }
    const RegionCurve &curve(std::size_t m, std::size_t l) const { return curves_[m * regions_ + l]; }
    double prob(std::size_t m, std::size_t l) const { return prob_[m * regions_ + l]; }
    std::span<const double> probs() const noexcept { return prob_; }

private:
    std::size_t users_;
    std::size_t regions_;
    std::vector<RegionCurve> curves_;
    std::vector<double> prob_;
};

// Per (user, region) optimal rate R*, its power P(R*) and the cost
// C = mu * P(R*) - lambda * R* on one channel. Row-major, index m * L + l.
struct ChannelTable {
    std::size_t users = 0;
    std::size_t regions = 0;
    std::vector<double> rate;
    std::vector<double> power;
    std::vector<double> cost;
    std::vector<double> prob;

    double rate_at(std::size_t m, std::size_t l) const { return rate[m * regions + l]; }
    double power_at(std::size_t m, std::size_t l) const { return power[m * regions + l]; }
    double cost_at(std::size_t m, std::size_t l) const { return cost[m * regions + l]; }
    double prob_at(std::size_t m, std::size_t l) const { return prob[m * regions + l]; }

    // Costs, rates and powers of the users in a column, gathered.
    void gather(std::span<const std::uint32_t> column, double *cost_out, double *rate_out,
                double *power_out) const;
};

ChannelTable build_channel_table(const ChannelCurves &curves, const Multipliers &mult);

// Tables for every channel of the grid.
std::vector<ChannelTable> build_tables(const PowerRateModel &model, const QuantizerGrid &grid,
                                       const Multipliers &mult);

struct WinnerSets {
    std::vector<std::uint32_t> hard;   // users within the tie tolerance of a negative minimum
    std::vector<std::uint32_t> smooth; // users within eps of a negative minimum
    double min_cost = 0.0;
};

WinnerSets winner_sets(const ChannelTable &table, std::span<const std::uint32_t> column, double eps,
                       double tie_tol = kTieTolerance);

struct HardDecision {
    enum class Kind { idle, single, tie };
    Kind kind = Kind::idle;
    std::size_t user = 0;             // winner for single, lowest tied index for tie
    std::vector<std::uint32_t> tied;  // all tied users for tie
};

HardDecision hard_decision(const ChannelTable &table, std::span<const std::uint32_t> column,
                           double tie_tol = kTieTolerance);

// Smooth time-sharing weights of the users for one column. They sum to 1 when
// the minimum cost is negative and are all 0 otherwise.
std::vector<double> smooth_weights(const ChannelTable &table, std::span<const std::uint32_t> column,
                                   double eps);

// Validates eps > 0.
void check_epsilon(double eps);

} // namespace qsched
