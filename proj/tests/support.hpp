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

// Shared fixtures and independent oracles for the unit and acceptance suites.

#pragma once

#include "qsched/analysis.hpp"
#include "qsched/dual.hpp"
#include "qsched/solver.hpp"
#include "qsched/tie_lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace qsched::testing {

inline Problem make_tc1(double snr_db = 6.0, std::uint64_t seed = 1)
{
    const FadingModel fm = FadingModel::uniform(4, 16, snr_db_to_gain(snr_db), seed);
    return Problem(PowerRateModel(OutageCapacity{}), build_equiprobable(fm, 4), {1, 1, 1, 1}, {4, 8, 12, 16});
}

// Distinct per-user means so ties are not structural.
inline Problem make_small(std::size_t M, std::size_t K, std::size_t L, std::vector<double> targets,
                          PowerRateModel model = PowerRateModel(OutageCapacity{}), std::uint64_t seed = 7)
{
    std::vector<double> means;
    for (std::size_t m = 0; m < M; ++m)
        means.push_back(2.0 + 0.7 * static_cast<double>(m));
    const FadingModel fm = FadingModel::per_user(means, K, seed);
    return Problem(std::move(model), build_equiprobable(fm, L), std::vector<double>(M, 1.0), std::move(targets));
}

// Table with random entries; with_ties copies some costs across users.
inline ChannelTable random_table(std::size_t M, std::size_t L, std::uint64_t seed, bool with_ties = false)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ChannelTable t;
    t.users = M;
    t.regions = L;
    t.rate.resize(M * L);
    t.power.resize(M * L);
    t.cost.resize(M * L);
    t.prob.resize(M * L);
    for (std::size_t m = 0; m < M; ++m) {
        double total = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            const std::size_t i = m * L + l;
            t.prob[i] = 0.1 + u(rng);
            total += t.prob[i];
            t.rate[i] = l == 0 ? 0.0 : 4.0 * u(rng);
            t.power[i] = l == 0 ? 0.0 : 3.0 * u(rng);
            t.cost[i] = l == 0 ? 0.0 : -2.0 * u(rng) + 0.3;
        }
        for (std::size_t l = 0; l < L; ++l)
            t.prob[m * L + l] /= total;
    }
    if (with_ties)
        for (std::size_t m = 1; m < M; ++m)
            for (std::size_t l = 1; l < L; l += 2)
                t.cost[m * L + l] = t.cost[(m - 1) * L + l];
    return t;
}

// Direct enumeration of one channel, written without the shared column kernels.
inline ChannelSums brute_force_channel(const ChannelTable &t, ScheduleMode mode, double eps, double tie_tol)
{
    const std::size_t M = t.users, L = t.regions;
    ChannelSums s;
    s.reset(M);
    std::vector<std::uint32_t> col(M, 0);
    std::size_t total = 1;
    for (std::size_t m = 0; m < M; ++m)
        total *= L;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t m = M; m-- > 0;) {
            col[m] = static_cast<std::uint32_t>(rest % L);
            rest /= L;
        }
        double P = 1.0;
        double cstar = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < M; ++m) {
            P *= t.prob_at(m, col[m]);
            cstar = std::min(cstar, t.cost_at(m, col[m]));
        }
        if (!(cstar < 0.0))
            continue;
        if (mode == ScheduleMode::hard) {
            s.value += P * cstar;
            for (std::size_t m = 0; m < M; ++m)
                if (t.cost_at(m, col[m]) <= cstar + tie_tol * std::abs(cstar)) {
                    s.rate[m] += P * t.rate_at(m, col[m]);
                    s.power[m] += P * t.power_at(m, col[m]);
                    break;
                }
        } else {
            std::vector<double> w(M, 0.0);
            double sum = 0.0;
            for (std::size_t m = 0; m < M; ++m) {
                const double d = t.cost_at(m, col[m]) - cstar;
                if (d < eps)
                    w[m] = (1.0 - d / eps) * (1.0 - d / eps);
                sum += w[m];
            }
            double v = cstar;
            for (std::size_t m = 0; m < M; ++m) {
                w[m] /= sum;
                v += w[m] * (t.cost_at(m, col[m]) - cstar);
                s.rate[m] += P * w[m] * t.rate_at(m, col[m]);
                s.power[m] += P * w[m] * t.power_at(m, col[m]);
            }
            s.value += P * v;
        }
    }
    return s;
}

// Minimum weighted power of a tie problem by exhaustive basis enumeration.
// Returns +inf when no feasible basis exists.
inline double vertex_enumeration_tie_lp(const TieProblem &p)
{
    const std::size_t M = p.targets.size();
    std::vector<std::size_t> kept;
    for (std::size_t m = 0; m < M; ++m) {
        bool member = false;
        for (const auto &inst : p.instances)
            member = member || std::find(inst.members.begin(), inst.members.end(), m) != inst.members.end();
        if (member)
            kept.push_back(m);
        else if (p.targets[m] - p.base_rate[m] > 1e-12)
            return std::numeric_limits<double>::infinity();
    }
    std::size_t nw = 0;
    for (const auto &inst : p.instances)
        nw += inst.members.size();
    const std::size_t rows = p.instances.size() + kept.size(), cols = nw + kept.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows)), c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
    std::size_t v = 0;
    for (std::size_t i = 0; i < p.instances.size(); ++i) {
        const auto &inst = p.instances[i];
        b(static_cast<Eigen::Index>(i)) = 1.0;
        for (std::size_t a = 0; a < inst.members.size(); ++a, ++v) {
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(v)) = 1.0;
            c(static_cast<Eigen::Index>(v)) = inst.prob * p.mu[inst.members[a]] * inst.power[a];
            const auto q = std::find(kept.begin(), kept.end(), inst.members[a]) - kept.begin();
            A(static_cast<Eigen::Index>(p.instances.size() + q), static_cast<Eigen::Index>(v)) =
                inst.prob * inst.rate[a];
        }
    }
    for (std::size_t q = 0; q < kept.size(); ++q) {
        A(static_cast<Eigen::Index>(p.instances.size() + q), static_cast<Eigen::Index>(nw + q)) = -1.0;
        b(static_cast<Eigen::Index>(p.instances.size() + q)) = p.targets[kept[q]] - p.base_rate[kept[q]];
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> pick(cols, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(rows), true);
    do {
        Eigen::MatrixXd B(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < cols; ++j)
            if (pick[j]) {
                B.col(static_cast<Eigen::Index>(idx.size())) = A.col(static_cast<Eigen::Index>(j));
                idx.push_back(j);
            }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (lu.rank() < static_cast<Eigen::Index>(rows))
            continue;
        const Eigen::VectorXd xb = lu.solve(b);
        if ((B * xb - b).cwiseAbs().maxCoeff() > 1e-10 || xb.minCoeff() < -1e-12)
            continue;
        double obj = 0.0;
        for (std::size_t i = 0; i < idx.size(); ++i)
            obj += c(static_cast<Eigen::Index>(idx[i])) * xb(static_cast<Eigen::Index>(i));
        best = std::min(best, obj);
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best + std::inner_product(p.mu.begin(), p.mu.end(), p.base_power.begin(), 0.0);
}

// Ties shaped like a 4-user, 1-channel case with tied sets {1,2}, {1,3,4}, {2,4}
// (0-based {0,1}, {0,2,3}, {1,3}). Targets are reachable by a random feasible point.
inline TieProblem example2_instance(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TieProblem p;
    p.mu = {1.0, 1.0 + u(rng), 0.5 + u(rng), 1.0};
    p.base_rate = {u(rng), 2.0 * u(rng), u(rng), 0.5 * u(rng)};
    p.base_power = {u(rng), u(rng), u(rng), u(rng)};
    const std::vector<std::vector<std::uint32_t>> sets{{0, 1}, {0, 2, 3}, {1, 3}};
    std::vector<double> reach = p.base_rate;
    for (const auto &set : sets) {
        TieInstance inst;
        inst.prob = 0.05 + 0.2 * u(rng);
        inst.members = set;
        std::vector<double> w(set.size());
        double sum = 0.0;
        for (auto &x : w) {
            x = 0.1 + u(rng);
            sum += x;
        }
        for (std::size_t a = 0; a < set.size(); ++a) {
            inst.rate.push_back(1.0 + 5.0 * u(rng));
            inst.power.push_back(0.5 + 4.0 * u(rng));
            reach[set[a]] += inst.prob * w[a] / sum * inst.rate.back();
        }
        p.instances.push_back(inst);
    }
    p.targets = reach;
    for (auto &t : p.targets)
        t *= 0.97;
    return p;
}

// lambda solving target = prob * R*(lambda) for a single outage-capacity
// region with effective gain g, by bisection on the closed-form rate.
inline double bisection_lambda(double target, double prob, double g, double mu, double rate_cap)
{
    auto served = [&](double lambda) {
        const double t = lambda / mu;
        const double r = t * g / std::log(2.0) > 1.0 ? std::log2(t * g / std::log(2.0)) : 0.0;
        return prob * std::min(r, rate_cap);
    };
    double lo = 0.0, hi = 1.0;
    while (served(hi) < target)
        hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (served(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace qsched::testing
