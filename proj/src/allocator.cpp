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

#include "qsched/allocator.hpp"
#include "qsched/errors.hpp"

#include <cmath>

#include <fmt/core.h>

namespace qsched {

void Multipliers::validate() const
{
    const std::size_t M = lambda.size();
    if (M == 0)
        throw ConfigError("at least one user is required");
    if (mu.size() != M || targets.size() != M)
        throw ConfigError(fmt::format("lambda, mu and targets must have equal length ({}, {}, {})", M,
                                      mu.size(), targets.size()));
    for (std::size_t m = 0; m < M; ++m) {
        if (!(lambda[m] >= 0.0) || !std::isfinite(lambda[m]))
            throw ConfigError(fmt::format("lambda[{}] must be finite and non-negative", m));
        if (!(mu[m] > 0.0) || !std::isfinite(mu[m]))
            throw ConfigError(fmt::format("mu[{}] must be finite and positive", m));
        if (!(targets[m] >= 0.0) || !std::isfinite(targets[m]))
            throw ConfigError(fmt::format("target[{}] must be finite and non-negative", m));
    }
}

void check_epsilon(double eps)
{
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw ConfigError(fmt::format("epsilon must be finite and positive, got {}", eps));
}

ChannelCurves::ChannelCurves(const PowerRateModel &model, const QuantizerGrid &grid, std::size_t channel)
    : users_(grid.users()), regions_(grid.regions())
{
    if (channel >= grid.channels())
        throw ConfigError(fmt::format("channel {} out of range", channel));
    curves_.reserve(users_ * regions_);
    prob_.reserve(users_ * regions_);
    for (std::size_t m = 0; m < users_; ++m)
        for (std::size_t l = 0; l < regions_; ++l) {
            const RegionContext ctx = grid.context(m, channel, l);
            curves_.emplace_back(model, ctx);
            prob_.push_back(ctx.probability());
        }
}

void ChannelTable::gather(std::span<const std::uint32_t> column, double *cost_out, double *rate_out,
                          double *power_out) const
{
    for (std::size_t m = 0; m < users; ++m) {
        const std::size_t i = m * regions + column[m];
        cost_out[m] = cost[i];
        rate_out[m] = rate[i];
        power_out[m] = power[i];
    }
}

ChannelTable build_channel_table(const ChannelCurves &curves, const Multipliers &mult)
{
    if (mult.users() != curves.users())
        throw ConfigError("multiplier length does not match number of users");
    ChannelTable t;
    t.users = curves.users();
    t.regions = curves.regions();
    const std::size_t n = t.users * t.regions;
    t.rate.resize(n);
    t.power.resize(n);
    t.cost.resize(n);
    t.prob.assign(curves.probs().begin(), curves.probs().end());
    for (std::size_t m = 0; m < t.users; ++m) {
        const double ratio = mult.lambda[m] / mult.mu[m];
        for (std::size_t l = 0; l < t.regions; ++l) {
            const std::size_t i = m * t.regions + l;
            const RatePower rp = curves.curve(m, l).optimum(ratio);
            t.rate[i] = rp.rate;
            t.power[i] = rp.power;
            t.cost[i] = rp.rate > 0.0 ? mult.mu[m] * rp.power - mult.lambda[m] * rp.rate : 0.0;
        }
    }
    return t;
}

std::vector<ChannelTable> build_tables(const PowerRateModel &model, const QuantizerGrid &grid,
                                       const Multipliers &mult)
{
    mult.validate();
    if (mult.users() != grid.users())
        throw ConfigError("multiplier length does not match number of users");
    std::vector<ChannelTable> out;
    out.reserve(grid.channels());
    for (std::size_t k = 0; k < grid.channels(); ++k)
        out.push_back(build_channel_table(ChannelCurves(model, grid, k), mult));
    return out;
}

namespace {

void check_column(const ChannelTable &table, std::span<const std::uint32_t> column)
{
    if (column.size() != table.users)
        throw ConfigError("column length does not match number of users");
    for (auto l : column)
        if (l >= table.regions)
            throw ConfigError(fmt::format("region index {} out of range", l));
}

} // namespace

WinnerSets winner_sets(const ChannelTable &table, std::span<const std::uint32_t> column, double eps,
                       double tie_tol)
{
    check_column(table, column);
    check_epsilon(eps);
    const std::size_t M = table.users;
    std::vector<double> c(M), r(M), p(M);
    table.gather(column, c.data(), r.data(), p.data());
    WinnerSets ws;
    ws.min_cost = column_math::min_cost(c.data(), M);
    if (!(ws.min_cost < 0.0))
        return ws;
    const double thr = ws.min_cost + tie_tol * std::abs(ws.min_cost);
    for (std::size_t m = 0; m < M; ++m) {
        if (c[m] <= thr)
            ws.hard.push_back(static_cast<std::uint32_t>(m));
        if (c[m] - ws.min_cost < eps)
            ws.smooth.push_back(static_cast<std::uint32_t>(m));
    }
    return ws;
}

HardDecision hard_decision(const ChannelTable &table, std::span<const std::uint32_t> column, double tie_tol)
{
    const WinnerSets ws = winner_sets(table, column, 1.0, tie_tol);
    HardDecision d;
    if (ws.hard.empty())
        return d;
    d.user = ws.hard.front();
    if (ws.hard.size() == 1) {
        d.kind = HardDecision::Kind::single;
    } else {
        d.kind = HardDecision::Kind::tie;
        d.tied = ws.hard;
    }
    return d;
}

std::vector<double> smooth_weights(const ChannelTable &table, std::span<const std::uint32_t> column, double eps)
{
    check_column(table, column);
    check_epsilon(eps);
    const std::size_t M = table.users;
    std::vector<double> c(M), r(M), p(M), n2(M);
    table.gather(column, c.data(), r.data(), p.data());
    const double cstar = column_math::min_cost(c.data(), M);
    const double sum = column_math::smooth_raw_weights(c.data(), M, cstar, eps, n2.data());
    std::vector<double> w(M, 0.0);
    if (sum > 0.0)
        for (std::size_t m = 0; m < M; ++m)
            w[m] = n2[m] / sum;
    return w;
}

} // namespace qsched
