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

#include "qsched/dual.hpp"
#include "qsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace qsched {

Problem::Problem(PowerRateModel model, QuantizerGrid grid, std::vector<double> mu, std::vector<double> targets,
                 std::size_t enumeration_budget)
    : model_(std::move(model)), grid_(std::move(grid)), mu_(std::move(mu)), targets_(std::move(targets)),
      budget_(enumeration_budget)
{
    Multipliers probe{std::vector<double>(users(), 0.0), mu_, targets_};
    probe.validate();
    if (mu_.size() != users())
        throw ConfigError("mu and targets must have one entry per user");

    class_of_.resize(channels());
    std::vector<std::size_t> representative;
    for (std::size_t k = 0; k < channels(); ++k) {
        std::size_t c = 0;
        while (c < representative.size() && !grid_.same_channel_statistics(representative[c], k))
            ++c;
        if (c == representative.size()) {
            representative.push_back(k);
            multiplicity_.push_back(0.0);
            curves_.emplace_back(model_, grid_, k);
        }
        multiplicity_[c] += 1.0;
        class_of_[k] = c;
    }
}

Multipliers Problem::multipliers(std::span<const double> lambda) const
{
    Multipliers m{std::vector<double>(lambda.begin(), lambda.end()), mu_, targets_};
    m.validate();
    return m;
}

std::vector<ChannelTable> Problem::class_tables(std::span<const double> lambda) const
{
    const Multipliers mult = multipliers(lambda);
    std::vector<ChannelTable> out;
    out.reserve(curves_.size());
    for (const auto &c : curves_)
        out.push_back(build_channel_table(c, mult));
    return out;
}

namespace {

DualEvaluation start_evaluation(const Problem &p, std::span<const double> lambda)
{
    DualEvaluation ev;
    ev.rate.assign(p.users(), 0.0);
    ev.power.assign(p.users(), 0.0);
    for (std::size_t m = 0; m < p.users(); ++m)
        ev.value += lambda[m] * p.targets()[m];
    return ev;
}

void finish_evaluation(const Problem &p, DualEvaluation &ev)
{
    ev.subgradient.resize(p.users());
    ev.weighted_power = 0.0;
    for (std::size_t m = 0; m < p.users(); ++m) {
        ev.subgradient[m] = p.targets()[m] - ev.rate[m];
        ev.weighted_power += p.mu()[m] * ev.power[m];
    }
}

} // namespace

DualEvaluation exact_dual(const Problem &problem, std::span<const double> lambda, ScheduleMode mode, double eps,
                          double tie_tol)
{
    check_epsilon(eps);
    column_count(problem.users(), problem.regions(), problem.enumeration_budget());
    const auto tables = problem.class_tables(lambda);
    DualEvaluation ev = start_evaluation(problem, lambda);
    ChannelSums sums;
    for (std::size_t c = 0; c < tables.size(); ++c) {
        reduce_channel(tables[c], mode, eps, tie_tol, sums);
        const double mult = problem.class_multiplicity(c);
        ev.value += mult * sums.value;
        for (std::size_t m = 0; m < problem.users(); ++m) {
            ev.rate[m] += mult * sums.rate[m];
            ev.power[m] += mult * sums.power[m];
        }
    }
    finish_evaluation(problem, ev);
    return ev;
}

DualEvaluation hard_dual_sorted(const Problem &problem, std::span<const double> lambda)
{
    const auto tables = problem.class_tables(lambda);
    const std::size_t M = problem.users(), L = problem.regions();
    DualEvaluation ev = start_evaluation(problem, lambda);

    // per user: costs sorted ascending and the probability mass at or above each position
    std::vector<std::vector<double>> sorted_cost(M), tail_mass(M);
    std::vector<std::size_t> order(L);

    for (std::size_t c = 0; c < tables.size(); ++c) {
        const ChannelTable &t = tables[c];
        for (std::size_t m = 0; m < M; ++m) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return t.cost_at(m, a) < t.cost_at(m, b); });
            sorted_cost[m].resize(L);
            tail_mass[m].assign(L + 1, 0.0);
            for (std::size_t i = 0; i < L; ++i)
                sorted_cost[m][i] = t.cost_at(m, order[i]);
            for (std::size_t i = L; i-- > 0;)
                tail_mass[m][i] = tail_mass[m][i + 1] + t.prob_at(m, order[i]);
        }
        // Pr(C_u > x) and Pr(C_u >= x)
        auto above = [&](std::size_t u, double x) {
            const auto &s = sorted_cost[u];
            return tail_mass[u][std::upper_bound(s.begin(), s.end(), x) - s.begin()];
        };
        auto at_or_above = [&](std::size_t u, double x) {
            const auto &s = sorted_cost[u];
            return tail_mass[u][std::lower_bound(s.begin(), s.end(), x) - s.begin()];
        };

        const double mult = problem.class_multiplicity(c);
        double value = 0.0;
        std::vector<double> rate(M, 0.0), power(M, 0.0);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t l = 0; l < L; ++l) {
                const double x = t.cost_at(m, l);
                if (!(x < 0.0))
                    continue;
                double pw = t.prob_at(m, l);
                // lower indices must be strictly worse, higher ones no better
                for (std::size_t u = 0; u < M && pw > 0.0; ++u) {
                    if (u == m)
                        continue;
                    pw *= u < m ? above(u, x) : at_or_above(u, x);
                }
                value += pw * x;
                rate[m] += pw * t.rate_at(m, l);
                power[m] += pw * t.power_at(m, l);
            }
        ev.value += mult * value;
        for (std::size_t m = 0; m < M; ++m) {
            ev.rate[m] += mult * rate[m];
            ev.power[m] += mult * power[m];
        }
    }
    finish_evaluation(problem, ev);
    return ev;
}

BlockAllocation allocate_block(const Problem &problem, const std::vector<ChannelTable> &class_tables,
                               const Matrix<std::uint32_t> &qcsi, ScheduleMode mode, double eps, double tie_tol)
{
    check_epsilon(eps);
    const std::size_t M = problem.users(), K = problem.channels();
    if (qcsi.rows() != M || qcsi.cols() != K)
        throw ConfigError(fmt::format("QCSI matrix is {}x{}, expected {}x{}", qcsi.rows(), qcsi.cols(), M, K));
    if (class_tables.size() != problem.classes())
        throw ConfigError("one table per channel class is required");

    BlockAllocation out;
    out.rate.assign(M, 0.0);
    out.power.assign(M, 0.0);
    out.weights = Matrix<double>(M, K);
    std::vector<std::uint32_t> col(M);
    std::vector<double> c(M), r(M), p(M), scratch(M), rk(M), pk(M);

    for (std::size_t k = 0; k < K; ++k) {
        const ChannelTable &t = class_tables[problem.class_of(k)];
        for (std::size_t m = 0; m < M; ++m) {
            col[m] = qcsi(m, k);
            if (col[m] >= t.regions)
                throw ConfigError(fmt::format("QCSI entry {} out of range", col[m]));
        }
        t.gather(col, c.data(), r.data(), p.data());
        std::fill(rk.begin(), rk.end(), 0.0);
        std::fill(pk.begin(), pk.end(), 0.0);
        double value = 0.0;
        // unit probability keeps the per-channel arithmetic identical to the expectation kernels
        if (mode == ScheduleMode::hard)
            column_math::accumulate_hard(c.data(), r.data(), p.data(), M, 1.0, tie_tol, value, rk.data(), pk.data());
        else
            column_math::accumulate_smooth(c.data(), r.data(), p.data(), M, 1.0, eps, value, rk.data(), pk.data(),
                                           scratch.data());
        const double cstar = column_math::min_cost(c.data(), M);
        if (mode == ScheduleMode::hard) {
            const std::size_t w = column_math::hard_winner(c.data(), M, cstar, tie_tol);
            if (w < M)
                out.weights(w, k) = 1.0;
        } else {
            const double sum = column_math::smooth_raw_weights(c.data(), M, cstar, eps, scratch.data());
            if (sum > 0.0)
                for (std::size_t m = 0; m < M; ++m)
                    out.weights(m, k) = scratch[m] / sum;
        }
        for (std::size_t m = 0; m < M; ++m) {
            out.rate[m] += rk[m];
            out.power[m] += pk[m];
        }
    }
    return out;
}

std::vector<double> stochastic_subgradient(const Problem &problem, std::span<const double> lambda,
                                           const Matrix<std::uint32_t> &qcsi, double eps)
{
    const auto tables = problem.class_tables(lambda);
    const BlockAllocation a = allocate_block(problem, tables, qcsi, ScheduleMode::smooth, eps);
    std::vector<double> g(problem.users());
    for (std::size_t m = 0; m < g.size(); ++m)
        g[m] = problem.targets()[m] - a.rate[m];
    return g;
}

JacobianReport jacobian_check(const Problem &problem, std::span<const double> lambda, double eps, double step)
{
    if (!(step > 0.0))
        throw ConfigError("finite-difference step must be positive");
    const std::size_t M = problem.users();
    JacobianReport rep;
    rep.jacobian.resize(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    std::vector<double> lp(lambda.begin(), lambda.end()), lm = lp;
    for (std::size_t j = 0; j < M; ++j) {
        const double hi = lambda[j] + step;
        const double lo = std::max(0.0, lambda[j] - step);
        lp = std::vector<double>(lambda.begin(), lambda.end());
        lm = lp;
        lp[j] = hi;
        lm[j] = lo;
        const auto gp = exact_dual(problem, lp, ScheduleMode::smooth, eps).subgradient;
        const auto gm = exact_dual(problem, lm, ScheduleMode::smooth, eps).subgradient;
        for (std::size_t i = 0; i < M; ++i)
            rep.jacobian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (gp[i] - gm[i]) / (hi - lo);
    }
    const Eigen::MatrixXd sym = 0.5 * (rep.jacobian + rep.jacobian.transpose());
    rep.asymmetry = (0.5 * (rep.jacobian - rep.jacobian.transpose())).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    rep.sym_eigenvalues = es.eigenvalues();
    return rep;
}

} // namespace qsched
