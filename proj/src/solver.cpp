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

#include "qsched/solver.hpp"
#include "qsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/core.h>
#include <fmt/ostream.h>

namespace qsched {

void SolverConfig::finalize(std::size_t users)
{
    if (init.empty())
        init.assign(users, 0.1);
    if (tol.empty())
        tol.assign(users, 1e-3);
    if (init.size() != users || tol.size() != users)
        throw ConfigError(fmt::format("solver init and tol need {} entries", users));
    for (double v : init)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ConfigError("initial multipliers must be finite and non-negative");
    for (double v : tol)
        if (!(v > 0.0))
            throw ConfigError("tolerances must be positive");
    if (!(step > 0.0) || !std::isfinite(step))
        throw ConfigError("step must be finite and positive");
    if (!(nonsmooth_kappa > 0.0) || !std::isfinite(nonsmooth_kappa))
        throw ConfigError("nonsmooth_kappa must be finite and positive");
    if (!(nonsmooth_exponent > 0.0) || !(nonsmooth_exponent <= 1.0))
        throw ConfigError("nonsmooth_exponent must lie in (0, 1]");
    if (!(online_rate_tol > 0.0))
        throw ConfigError("online_rate_tol must be positive");
    if (max_iters == 0)
        throw ConfigError("max_iters must be positive");
    if (record_every == 0)
        throw ConfigError("record_every must be positive");
    check_epsilon(eps);
}

void Trajectory::push(std::size_t it, std::span<const double> lam, std::span<const double> sub,
                      std::span<const double> r, double pw, double val)
{
    iter.push_back(it);
    lambda.insert(lambda.end(), lam.begin(), lam.end());
    subgradient.insert(subgradient.end(), sub.begin(), sub.end());
    rate.insert(rate.end(), r.begin(), r.end());
    power.push_back(pw);
    value.push_back(val);
}

void write_trajectory_csv(std::ostream &os, const Trajectory &t)
{
    os << "iter";
    for (const char *name : {"lambda", "subgrad", "rate"})
        for (std::size_t m = 1; m <= t.users; ++m)
            fmt::print(os, ",{}_{}", name, m);
    os << ",power\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        fmt::print(os, "{}", t.iter[i]);
        for (const auto *v : {&t.lambda, &t.subgradient, &t.rate})
            for (std::size_t m = 0; m < t.users; ++m)
                fmt::print(os, ",{:.17g}", (*v)[i * t.users + m]);
        fmt::print(os, ",{:.17g}\n", t.power[i]);
    }
}

namespace {

bool gradient_small(std::span<const double> lambda, std::span<const double> g, std::span<const double> tol)
{
    for (std::size_t m = 0; m < g.size(); ++m) {
        if (lambda[m] == 0.0 && g[m] <= 0.0)
            continue;
        if (!(std::abs(g[m]) < tol[m]))
            return false;
    }
    return true;
}

void ascend(std::vector<double> &lambda, std::span<const double> g, double step)
{
    for (std::size_t m = 0; m < lambda.size(); ++m)
        lambda[m] = std::max(0.0, lambda[m] + step * g[m]);
}

void check_finite(const DualEvaluation &ev, std::size_t it)
{
    if (!std::isfinite(ev.value))
        throw NumericError(fmt::format("dual value is not finite at iteration {}", it), ev.value);
}

} // namespace

SolveResult run_offline_smooth(const Problem &problem, const SolverConfig &cfg_in)
{
    SolverConfig cfg = cfg_in;
    cfg.finalize(problem.users());
    SolveResult res;
    res.trajectory.users = problem.users();
    res.best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> lambda = cfg.init;

    for (std::size_t it = 0;; ++it) {
        const DualEvaluation ev = exact_dual(problem, lambda, ScheduleMode::smooth, cfg.eps);
        check_finite(ev, it);
        if (ev.value > res.best_value) {
            res.best_value = ev.value;
            res.best_lambda = lambda;
        }
        const bool done = gradient_small(lambda, ev.subgradient, cfg.tol);
        const bool last = done || it == cfg.max_iters;
        if (it % cfg.record_every == 0 || last)
            res.trajectory.push(it, lambda, ev.subgradient, ev.rate, ev.weighted_power, ev.value);
        if (cfg.progress && cfg.progress_every > 0 && it % cfg.progress_every == 0)
            cfg.progress(it, lambda, ev);
        if (last) {
            res.converged = done;
            res.iterations = it;
            res.lambda = lambda;
            res.final_eval = ev;
            return res;
        }
        ascend(lambda, ev.subgradient, cfg.step);
    }
}

SolveResult run_offline_nonsmooth(const Problem &problem, const SolverConfig &cfg_in)
{
    SolverConfig cfg = cfg_in;
    cfg.finalize(problem.users());
    SolveResult res;
    res.trajectory.users = problem.users();
    res.best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> lambda = cfg.init;

    // window for the stability check, always recorded at full resolution
    const std::size_t window_start = cfg.max_iters - cfg.max_iters / 10;
    std::vector<double> lo(problem.users(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(problem.users(), -std::numeric_limits<double>::infinity());

    auto evaluate = [&](const std::vector<double> &lam) {
        return cfg.hard_evaluator == HardEvaluator::sorted ? hard_dual_sorted(problem, lam)
                                                           : exact_dual(problem, lam, ScheduleMode::hard, cfg.eps);
    };

    for (std::size_t it = 0;; ++it) {
        const DualEvaluation ev = evaluate(lambda);
        check_finite(ev, it);
        if (ev.value > res.best_value) {
            res.best_value = ev.value;
            res.best_lambda = lambda;
        }
        if (it >= window_start)
            for (std::size_t m = 0; m < lambda.size(); ++m) {
                lo[m] = std::min(lo[m], lambda[m]);
                hi[m] = std::max(hi[m], lambda[m]);
            }
        const bool last = it == cfg.max_iters;
        if (it % cfg.record_every == 0 || last)
            res.trajectory.push(it, lambda, ev.subgradient, ev.rate, ev.weighted_power, ev.value);
        if (cfg.progress && cfg.progress_every > 0 && it % cfg.progress_every == 0)
            cfg.progress(it, lambda, ev);
        if (last) {
            res.converged = true;
            for (std::size_t m = 0; m < lambda.size(); ++m)
                if (hi[m] - lo[m] > 0.01 * std::max(std::abs(hi[m]), 1e-12))
                    res.converged = false;
            res.iterations = it;
            res.lambda = lambda;
            res.final_eval = ev;
            return res;
        }
        const double step = cfg.nonsmooth_kappa * std::pow(static_cast<double>(it + 1), -cfg.nonsmooth_exponent);
        ascend(lambda, ev.subgradient, step);
    }
}

SolveResult run_online(const Problem &problem, const FadingModel &fading, const SolverConfig &cfg_in,
                       std::size_t blocks)
{
    SolverConfig cfg = cfg_in;
    cfg.finalize(problem.users());
    if (fading.users() != problem.users() || fading.channels() != problem.channels())
        throw ConfigError("fading model and problem dimensions differ");
    if (blocks == 0)
        throw ConfigError("online run needs at least one block");
    const std::size_t M = problem.users();
    SolveResult res;
    res.trajectory.users = M;
    std::vector<double> lambda = cfg.init;
    std::vector<double> rate_sum(M, 0.0), power_sum(M, 0.0), avg_rate(M), sub(M);

    for (std::size_t n = 0; n < blocks; ++n) {
        const auto tables = problem.class_tables(lambda);
        const auto qcsi = quantize(problem.grid(), sample_gains(fading, n));
        const BlockAllocation a = allocate_block(problem, tables, qcsi, ScheduleMode::smooth, cfg.eps);
        double weighted = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            sub[m] = problem.targets()[m] - a.rate[m];
            rate_sum[m] += a.rate[m];
            power_sum[m] += a.power[m];
            avg_rate[m] = rate_sum[m] / static_cast<double>(n + 1);
            weighted += problem.mu()[m] * power_sum[m] / static_cast<double>(n + 1);
        }
        const bool last = n + 1 == blocks;
        if (n % cfg.record_every == 0 || last)
            res.trajectory.push(n, lambda, sub, avg_rate, weighted, std::numeric_limits<double>::quiet_NaN());
        if (cfg.progress && cfg.progress_every > 0 && n % cfg.progress_every == 0) {
            DualEvaluation ev;
            ev.subgradient = sub;
            ev.rate = avg_rate;
            ev.weighted_power = weighted;
            cfg.progress(n, lambda, ev);
        }
        if (last) {
            res.final_eval.rate = avg_rate;
            res.final_eval.power.resize(M);
            res.final_eval.subgradient.resize(M);
            for (std::size_t m = 0; m < M; ++m) {
                res.final_eval.power[m] = power_sum[m] / static_cast<double>(blocks);
                res.final_eval.subgradient[m] = problem.targets()[m] - avg_rate[m];
            }
            res.final_eval.weighted_power = weighted;
            res.final_eval.value = std::numeric_limits<double>::quiet_NaN();
            res.converged = true;
            for (std::size_t m = 0; m < M; ++m) {
                const double g = res.final_eval.subgradient[m];
                if (lambda[m] == 0.0 && g <= 0.0)
                    continue;
                if (!(std::abs(g) <= cfg.online_rate_tol * problem.targets()[m]))
                    res.converged = false;
            }
        }
        ascend(lambda, sub, cfg.step);
    }
    res.iterations = blocks;
    res.lambda = lambda;
    return res;
}

double trailing_lambda_variation(const Trajectory &t, double fraction, double floor)
{
    if (t.size() == 0)
        return 0.0;
    const std::size_t last_iter = t.iter.back();
    const double start = static_cast<double>(last_iter) * (1.0 - fraction);
    double worst = 0.0;
    for (std::size_t m = 0; m < t.users; ++m) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (static_cast<double>(t.iter[i]) < start)
                continue;
            const double v = t.lambda[i * t.users + m];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
            ++n;
        }
        if (n == 0)
            continue;
        worst = std::max(worst, (hi - lo) / std::max(std::abs(sum / static_cast<double>(n)), floor));
    }
    return worst;
}

} // namespace qsched
