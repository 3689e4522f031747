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

#include "qsched/analysis.hpp"
#include "qsched/errors.hpp"
#include "qsched/tie_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

namespace qsched {

namespace {

// ceil(x) that ignores representation error just above an integer
std::uint64_t ceil_bits(double x)
{
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, r))
        return static_cast<std::uint64_t>(r);
    return static_cast<std::uint64_t>(std::ceil(x));
}

bool sole_winner(const ChannelTable &t, std::span<const std::uint32_t> col, std::size_t m)
{
    const double c = t.cost_at(m, col[m]);
    if (!(c < 0.0))
        return false;
    for (std::size_t u = 0; u < t.users; ++u)
        if (u != m && !(c < t.cost_at(u, col[u])))
            return false;
    return true;
}

} // namespace

OverheadReport feedback_bits(std::size_t users, std::size_t channels, std::size_t regions)
{
    if (users == 0 || channels == 0 || regions == 0)
        throw ConfigError("overhead needs positive users, channels and regions");
    const double M = static_cast<double>(users), K = static_cast<double>(channels);
    const double L = static_cast<double>(regions);
    OverheadReport r;
    r.full_qcsi_bits = ceil_bits(K * M * std::log2(L));
    r.allocation_bits = ceil_bits(K * std::log2(M * L + 1.0));
    r.per_channel_bits = ceil_bits(std::log2(M * L + 1.0));
    return r;
}

std::optional<std::size_t> realize_probabilistic_access(std::span<const double> weights, double u)
{
    if (!(u >= 0.0) || !(u < 1.0))
        throw ConfigError(fmt::format("access draw must lie in [0, 1), got {}", u));
    double acc = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        if (weights[m] < 0.0)
            throw ConfigError("access weights must be non-negative");
        acc += weights[m];
        if (u < acc)
            return m;
    }
    return std::nullopt;
}

std::vector<ClusterViolation> cluster_audit(const ChannelTable &table, std::size_t budget)
{
    const std::size_t M = table.users, L = table.regions;
    std::vector<ClusterViolation> out;
    std::vector<std::uint32_t> next;
    for (const auto &col : enumerate_columns(M, L, budget)) {
        for (std::size_t m = 0; m < M; ++m) {
            const bool wins = sole_winner(table, col, m);
            // property 1: own region one step better
            if (wins && col[m] + 1 < L) {
                next = col;
                ++next[m];
                if (!sole_winner(table, next, m))
                    out.push_back({1, m, col, next});
            }
            for (std::size_t u = 0; u < M; ++u) {
                if (u == m)
                    continue;
                // property 2: another user one step worse
                if (wins && col[u] > 0) {
                    next = col;
                    --next[u];
                    if (!sole_winner(table, next, m))
                        out.push_back({2, m, col, next});
                }
                // property 3: another user one step better
                if (!wins && col[u] + 1 < L) {
                    next = col;
                    ++next[u];
                    if (sole_winner(table, next, m))
                        out.push_back({3, m, col, next});
                }
            }
        }
    }
    return out;
}

std::string_view scheme_name(Scheme s)
{
    switch (s) {
    case Scheme::RA1: return "RA1";
    case Scheme::RA2: return "RA2";
    case Scheme::RA3: return "RA3";
    case Scheme::RA4: return "RA4";
    case Scheme::RA5: return "RA5";
    }
    return "?";
}

Scheme scheme_from_name(std::string_view name)
{
    for (Scheme s : {Scheme::RA1, Scheme::RA2, Scheme::RA3, Scheme::RA4, Scheme::RA5})
        if (scheme_name(s) == name)
            return s;
    throw ConfigError(fmt::format("unknown scheme '{}'", name));
}

double to_db(double linear)
{
    return 10.0 * std::log10(linear);
}

FadingModel setup_fading(const SchemeSetup &s)
{
    const double snr = snr_db_to_gain(s.snr_db);
    if (s.tap_powers.empty())
        return FadingModel::uniform(s.users, s.channels, snr, s.seed);
    return FadingModel::from_taps(s.users, s.channels, snr, s.tap_powers, s.seed);
}

namespace {

Problem make_problem(const SchemeSetup &s, QuantizerGrid grid)
{
    return Problem(s.model, std::move(grid), s.mu, s.targets, s.enumeration_budget);
}

SchemeResult finish(Scheme scheme, const SchemeSetup &s, double power, std::vector<double> rate, bool ok,
                    std::string status)
{
    SchemeResult r;
    r.scheme = scheme;
    r.snr_db = s.snr_db;
    r.weighted_power = power;
    r.power_db = power > 0.0 ? to_db(power) : -std::numeric_limits<double>::infinity();
    r.rate = std::move(rate);
    r.ok = ok;
    r.status = std::move(status);
    return r;
}

SchemeResult smooth_scheme(Scheme scheme, const SchemeSetup &s, const SolveResult &res)
{
    return finish(scheme, s, res.final_eval.weighted_power, res.final_eval.rate, res.converged,
                  res.converged ? "converged" : fmt::format("not converged after {} iterations", res.iterations));
}

} // namespace

SolveResult smooth_reference(const SchemeSetup &setup)
{
    const Problem p = make_problem(setup, build_equiprobable(setup_fading(setup), setup.regions));
    return run_offline_smooth(p, setup.solver);
}

SchemeResult run_ra3(const SchemeSetup &setup, const SolveResult &smooth)
{
    return smooth_scheme(Scheme::RA3, setup, smooth);
}

SchemeResult run_ra4(const SchemeSetup &setup)
{
    const FadingModel fm = setup_fading(setup);
    double mean = 0.0;
    for (double g : fm.mean_gains().data())
        mean += g;
    mean /= static_cast<double>(fm.mean_gains().data().size());
    const Problem p = make_problem(setup, build_random(fm, setup.regions, setup.random_gain_max_rel * mean,
                                                       setup.seed ^ 0x5eedULL));
    return smooth_scheme(Scheme::RA4, setup, run_offline_smooth(p, setup.solver));
}

SchemeResult run_ra5(const SchemeSetup &setup)
{
    const FadingModel fm = setup_fading(setup);
    const QuantizerGrid grid = build_equiprobable(fm, setup.regions);
    const std::size_t M = setup.users, K = setup.channels, L = setup.regions;

    std::vector<std::vector<std::size_t>> owned(M);
    for (std::size_t k = 0; k < K; ++k)
        owned[k % M].push_back(k);

    std::vector<double> rate(M, 0.0);
    double total = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        std::vector<RegionCurve> curves;
        std::vector<double> prob;
        for (std::size_t k : owned[m])
            for (std::size_t l = 0; l < L; ++l) {
                const RegionContext ctx = grid.context(m, k, l);
                RegionCurve c(setup.model, ctx);
                if (c.outage())
                    continue;
                curves.push_back(std::move(c));
                prob.push_back(ctx.probability());
            }
        const double target = setup.targets[m];
        if (target == 0.0)
            continue;
        if (curves.empty())
            return finish(Scheme::RA5, setup, std::numeric_limits<double>::quiet_NaN(), rate, false,
                          fmt::format("user {} owns no usable channel", m));
        auto served = [&](double p) {
            double r = 0.0;
            for (std::size_t i = 0; i < curves.size(); ++i)
                r += prob[i] * curves[i].rate(p);
            return r;
        };
        double lo = 0.0, hi = 1.0;
        for (int i = 0; served(hi) < target; ++i) {
            lo = hi;
            hi *= 2.0;
            if (i > 2000)
                return finish(Scheme::RA5, setup, std::numeric_limits<double>::quiet_NaN(), rate, false,
                              fmt::format("user {} target unreachable", m));
        }
        for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (served(mid) < target ? lo : hi) = mid;
        }
        const double p = hi;
        double on = 0.0;
        for (double q : prob)
            on += q;
        rate[m] = served(p);
        total += setup.mu[m] * on * p;
    }
    return finish(Scheme::RA5, setup, total, rate, true, "ok");
}

SchemeResult run_ra1(const SchemeSetup &setup, std::span<const double> start)
{
    const Problem fine = make_problem(setup, build_equiprobable(setup_fading(setup), setup.fine_regions));
    SolverConfig cfg = setup.solver;
    cfg.init.assign(start.begin(), start.end());
    cfg.max_iters = setup.reference_iters;
    cfg.nonsmooth_kappa = setup.reference_kappa;
    cfg.hard_evaluator = HardEvaluator::sorted;
    cfg.record_every = std::max<std::size_t>(1, setup.reference_iters / 100);
    cfg.progress = nullptr;
    const SolveResult res = run_offline_nonsmooth(fine, cfg);
    const DualEvaluation best = hard_dual_sorted(fine, res.best_lambda);
    return finish(Scheme::RA1, setup, res.best_value, best.rate, true,
                  fmt::format("hard dual maximized at L = {}", setup.fine_regions));
}

SchemeResult run_ra2(const SchemeSetup &setup, const SolveResult &smooth)
{
    const Problem p = make_problem(setup, build_equiprobable(setup_fading(setup), setup.regions));
    SolverConfig cfg = setup.solver;
    cfg.init = smooth.lambda;
    cfg.max_iters = setup.reference_iters;
    cfg.nonsmooth_kappa = setup.reference_kappa;
    cfg.record_every = std::max<std::size_t>(1, setup.reference_iters / 100);
    cfg.progress = nullptr;
    const SolveResult refined = run_offline_nonsmooth(p, cfg);

    const std::vector<std::vector<double>> candidates{refined.best_lambda, smooth.lambda};
    // same acceptance as the smooth solver: targets met within the gradient tolerance
    SolverConfig resolved = setup.solver;
    resolved.finalize(setup.users);
    std::vector<double> relaxed = p.targets();
    for (std::size_t m = 0; m < relaxed.size(); ++m)
        relaxed[m] = std::max(0.0, relaxed[m] - resolved.tol[m]);
    const double eps = setup.solver.eps;
    // narrowest gap first; wider gaps still give a primal-feasible allocation at the fixed rates
    const std::vector<double> gaps{1e-9, 1e-6, 1e-4, 1e-3, 1e-2, eps, 4.0 * eps, 20.0 * eps};

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_rate;
    std::string status = "tie LP infeasible for every candidate";
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto tables = p.class_tables(candidates[c]);
        for (double gap : gaps) {
            try {
                const TieProblem tp = collect_ties(tables, p.multiplicities(), p.mu(), relaxed, gap,
                                                   p.enumeration_budget());
                const TieSolution sol = solve_tie_lp(tp);
                if (sol.weighted_power < best) {
                    best = sol.weighted_power;
                    best_rate = sol.rate;
                    status = fmt::format("tie LP optimal ({} multipliers, gap {:g}, {} tied columns)",
                                         c == 0 ? "refined" : "smooth", gap, tp.instances.size());
                }
                break;
            } catch (const InfeasibleError &) {
                continue;
            }
        }
    }
    const bool ok = std::isfinite(best);
    return finish(Scheme::RA2, setup, ok ? best : std::numeric_limits<double>::quiet_NaN(), best_rate, ok, status);
}

SchemeResult run_scheme(Scheme scheme, const SchemeSetup &setup)
{
    switch (scheme) {
    case Scheme::RA1: return run_ra1(setup, smooth_reference(setup).lambda);
    case Scheme::RA2: return run_ra2(setup, smooth_reference(setup));
    case Scheme::RA3: return run_ra3(setup, smooth_reference(setup));
    case Scheme::RA4: return run_ra4(setup);
    case Scheme::RA5: return run_ra5(setup);
    }
    throw ConfigError("unknown scheme");
}

std::vector<SchemeResult> compare_schemes(const SchemeSetup &base, std::span<const double> snr_db,
                                          std::span<const Scheme> schemes)
{
    std::vector<SchemeResult> out;
    for (double snr : snr_db) {
        SchemeSetup s = base;
        s.snr_db = snr;
        std::optional<SolveResult> smooth;
        auto reference = [&]() -> const SolveResult & {
            if (!smooth)
                smooth = smooth_reference(s);
            return *smooth;
        };
        for (Scheme sc : schemes) {
            switch (sc) {
            case Scheme::RA1: out.push_back(run_ra1(s, reference().lambda)); break;
            case Scheme::RA2: out.push_back(run_ra2(s, reference())); break;
            case Scheme::RA3: out.push_back(run_ra3(s, reference())); break;
            case Scheme::RA4: out.push_back(run_ra4(s)); break;
            case Scheme::RA5: out.push_back(run_ra5(s)); break;
            }
        }
    }
    return out;
}

SweepResult sweep_regions(const SchemeSetup &base, std::span<const std::size_t> regions)
{
    if (regions.empty())
        throw ConfigError("region sweep needs at least one L");
    SweepResult out;
    std::vector<double> start;
    for (std::size_t L : regions) {
        SchemeSetup s = base;
        s.regions = L;
        const SolveResult res = smooth_reference(s);
        out.rows.push_back({L, to_db(res.final_eval.weighted_power), res.converged});
        start = res.lambda;
    }
    out.reference_db = run_ra1(base, start).power_db;
    return out;
}

} // namespace qsched
