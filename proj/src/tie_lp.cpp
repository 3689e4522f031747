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

#include "qsched/tie_lp.hpp"
#include "qsched/errors.hpp"
#include "qsched/simplex.hpp"

#include <cmath>

#include <fmt/core.h>

namespace qsched {

TieProblem collect_ties(const std::vector<ChannelTable> &tables, const std::vector<double> &multiplicity,
                        const std::vector<double> &mu, const std::vector<double> &targets, double tie_gap,
                        std::size_t budget)
{
    if (tables.empty() || tables.size() != multiplicity.size())
        throw ConfigError("tables and multiplicities must be non-empty and of equal length");
    if (!(tie_gap >= 0.0))
        throw ConfigError("tie gap must be non-negative");
    const std::size_t M = tables.front().users;
    if (mu.size() != M || targets.size() != M)
        throw ConfigError("mu and targets must match the number of users");

    TieProblem p;
    p.mu = mu;
    p.targets = targets;
    p.base_rate.assign(M, 0.0);
    p.base_power.assign(M, 0.0);
    std::vector<double> c(M), r(M), pw(M);

    for (std::size_t i = 0; i < tables.size(); ++i) {
        const ChannelTable &t = tables[i];
        for (const auto &col : enumerate_columns(M, t.regions, budget)) {
            double P = 1.0;
            for (std::size_t m = 0; m < M; ++m)
                P *= t.prob_at(m, col[m]);
            P *= multiplicity[i];
            t.gather(col, c.data(), r.data(), pw.data());
            const double cstar = column_math::min_cost(c.data(), M);
            if (!(cstar < 0.0))
                continue;
            TieInstance inst;
            for (std::size_t m = 0; m < M; ++m)
                if (c[m] - cstar <= tie_gap) {
                    inst.members.push_back(static_cast<std::uint32_t>(m));
                    inst.rate.push_back(r[m]);
                    inst.power.push_back(pw[m]);
                }
            if (inst.members.size() == 1) {
                const std::size_t w = inst.members.front();
                p.base_rate[w] += P * r[w];
                p.base_power[w] += P * pw[w];
                continue;
            }
            inst.channel = i;
            inst.column = col;
            inst.prob = P;
            p.instances.push_back(std::move(inst));
        }
    }
    return p;
}

TieSolution solve_tie_lp(const TieProblem &problem, double tol)
{
    const std::size_t M = problem.targets.size();
    if (problem.mu.size() != M || problem.base_rate.size() != M || problem.base_power.size() != M)
        throw ConfigError("tie problem vectors must have one entry per user");

    // variables: one weight per (instance, member), then one surplus per kept user row
    std::vector<std::size_t> offset(problem.instances.size() + 1, 0);
    for (std::size_t i = 0; i < problem.instances.size(); ++i)
        offset[i + 1] = offset[i] + problem.instances[i].members.size();
    const std::size_t nw = offset.back();

    std::vector<bool> has_member(M, false);
    for (const auto &inst : problem.instances)
        for (auto m : inst.members)
            has_member[m] = true;

    TieSolution sol;
    std::vector<std::size_t> kept;
    for (std::size_t m = 0; m < M; ++m) {
        const double residual = problem.targets[m] - problem.base_rate[m];
        if (has_member[m]) {
            kept.push_back(m);
            continue;
        }
        if (residual > tol * std::max(1.0, problem.targets[m]))
            throw InfeasibleError(fmt::format("user {} has no tied column but misses its target by {}", m, residual),
                                  residual);
        sol.dropped_rows.push_back(m);
    }

    LinearProgram lp;
    lp.rows = problem.instances.size() + kept.size();
    lp.cols = nw + kept.size();
    lp.A.assign(lp.rows * lp.cols, 0.0);
    lp.b.assign(lp.rows, 0.0);
    lp.c.assign(lp.cols, 0.0);

    for (std::size_t i = 0; i < problem.instances.size(); ++i) {
        const auto &inst = problem.instances[i];
        for (std::size_t a = 0; a < inst.members.size(); ++a) {
            const std::size_t v = offset[i] + a;
            lp.A[i * lp.cols + v] = 1.0;
            lp.c[v] = inst.prob * problem.mu[inst.members[a]] * inst.power[a];
        }
        lp.b[i] = 1.0;
    }
    for (std::size_t q = 0; q < kept.size(); ++q) {
        const std::size_t row = problem.instances.size() + q;
        const std::size_t m = kept[q];
        for (std::size_t i = 0; i < problem.instances.size(); ++i) {
            const auto &inst = problem.instances[i];
            for (std::size_t a = 0; a < inst.members.size(); ++a)
                if (inst.members[a] == m)
                    lp.A[row * lp.cols + offset[i] + a] = inst.prob * inst.rate[a];
        }
        lp.A[row * lp.cols + nw + q] = -1.0; // surplus
        lp.b[row] = problem.targets[m] - problem.base_rate[m];
    }

    const LpResult res = solve_lp(lp, tol);
    sol.iterations = res.iterations;
    if (res.status == LpStatus::infeasible)
        throw InfeasibleError(fmt::format("tie LP infeasible, phase-one residual {}", res.infeasibility),
                              res.infeasibility);
    if (res.status != LpStatus::optimal)
        throw NumericError("tie LP did not reach an optimal basis", res.infeasibility);

    sol.rate = problem.base_rate;
    sol.power = problem.base_power;
    sol.weights.resize(problem.instances.size());
    for (std::size_t i = 0; i < problem.instances.size(); ++i) {
        const auto &inst = problem.instances[i];
        for (std::size_t a = 0; a < inst.members.size(); ++a) {
            const double w = res.x[offset[i] + a];
            sol.weights[i].push_back(w);
            sol.rate[inst.members[a]] += inst.prob * w * inst.rate[a];
            sol.power[inst.members[a]] += inst.prob * w * inst.power[a];
        }
    }
    for (std::size_t m = 0; m < M; ++m)
        sol.weighted_power += problem.mu[m] * sol.power[m];
    return sol;
}

} // namespace qsched
