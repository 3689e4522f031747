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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "qsched/config.hpp"
#include "qsched/errors.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/core.h>

using namespace qsched;

namespace {

// pinned tolerances
constexpr double kRateMatch = 0.01;         // criterion 2: relative rate error
constexpr double kSmoothGradTol = 1e-3;     // criterion 2: gradient tolerance
constexpr double kLambdaVariation = 0.01;   // criterion 3
constexpr double kHoverRateError = 0.05;    // criterion 3
constexpr double kOnlineRateError = 0.05;   // criterion 5
constexpr double kSchemeMarginDb = 3.0;     // criterion 6
constexpr double kBisectionTol = 1e-6;      // criterion 8
constexpr double kTieLpTol = 1e-9;          // criterion 8
constexpr double kMonteCarloSigmas = 3.0;   // criterion 8
constexpr double kFiniteDiffTol = 1e-6;     // criterion 9
constexpr double kQuadratureTol = 1e-8;     // criterion 9

const std::string config_dir = QSCHED_CONFIG_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_err(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

Problem tc1_problem()
{
    return testing::make_tc1(6.0, 1);
}

Outcome duality_gap_bound()
{
    const auto t0 = std::chrono::steady_clock::now();
    const double eps = 0.05;
    const Problem p = testing::make_small(2, 2, 4, {2.0, 3.0});
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    int violations = 0;
    double widest = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> lam{u(rng), u(rng)};
        const double d = exact_dual(p, lam, ScheduleMode::hard, eps).value;
        const double ds = exact_dual(p, lam, ScheduleMode::smooth, eps).value;
        if (!(d <= ds && ds < d + 2.0 * eps))
            ++violations;
        widest = std::max(widest, ds - d);
    }
    const double t = seconds_since(t0);
    return {violations == 0 && t < 10.0,
            fmt::format("violations {}/100, max Ds-D {:.4g} (K eps = {}), {:.2f} s", violations, widest, 2.0 * eps, t)};
}

// Hard dual maximized by successive grid refinement over two multipliers.
double grid_max_hard_dual(const Problem &p, double lo0, double hi0, double lo1, double hi1)
{
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> arg{lo0, lo1};
    for (int level = 0; level < 6; ++level) {
        const int n = 40;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                const std::vector<double> lam{lo0 + (hi0 - lo0) * i / n, lo1 + (hi1 - lo1) * j / n};
                const double v = exact_dual(p, lam, ScheduleMode::hard, 0.05).value;
                if (v > best) {
                    best = v;
                    arg = lam;
                }
            }
        const double w0 = (hi0 - lo0) / 8.0, w1 = (hi1 - lo1) / 8.0;
        lo0 = std::max(0.0, arg[0] - w0);
        hi0 = arg[0] + w0;
        lo1 = std::max(0.0, arg[1] - w1);
        hi1 = arg[1] + w1;
    }
    return best;
}

Outcome smooth_convergence()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Problem p = tc1_problem();
    SolverConfig cfg;
    cfg.step = 1e-2;
    cfg.eps = 0.05;
    cfg.tol.assign(4, kSmoothGradTol);
    cfg.max_iters = 200000;
    cfg.record_every = 1000;
    const SolveResult r = run_offline_smooth(p, cfg);
    double worst = 0.0;
    for (std::size_t m = 0; m < 4; ++m)
        worst = std::max(worst, rel_err(r.final_eval.rate[m], p.targets()[m]));
    const bool tc1_ok = r.converged && worst <= kRateMatch;

    // reduced instance against the maximized hard dual
    const Problem small = testing::make_small(2, 4, 4, {3.0, 6.0});
    SolverConfig sc;
    sc.step = 1e-2;
    sc.max_iters = 200000;
    sc.record_every = 1000;
    const SolveResult sr = run_offline_smooth(small, sc);
    const double dstar = grid_max_hard_dual(small, 0.0, 4.0 * sr.lambda[0] + 1.0, 0.0, 4.0 * sr.lambda[1] + 1.0);
    // smoothed dual optimum against the hard dual optimum, and the primal power of the smooth policy
    const double gap = sr.final_eval.value - dstar;
    const double primal_gap = sr.final_eval.weighted_power - dstar;
    const double bound = 4.0 * 0.05;
    const bool gap_ok = sr.converged && gap >= -1e-9 && gap < bound && primal_gap < bound;

    const double t = seconds_since(t0);
    return {tc1_ok && gap_ok && t < 300.0,
            fmt::format("beta 1e-2: converged {} after {} iters, worst rate error {:.3g}; reduced gap dual {:.4g}, "
                        "primal {:.4g} (bound {}), {:.1f} s",
                        r.converged, r.iterations, worst, gap, primal_gap, bound, t)};
}

Outcome nonsmooth_hovering()
{
    const Problem p = tc1_problem();
    SolverConfig cfg;
    cfg.nonsmooth_kappa = 1e-2;
    cfg.nonsmooth_exponent = 0.51;
    cfg.max_iters = 200000;
    cfg.record_every = 10;
    const SolveResult r = run_offline_nonsmooth(p, cfg);
    const double variation = trailing_lambda_variation(r.trajectory, 0.1);
    const Trajectory &t = r.trajectory;
    const double start = 0.9 * static_cast<double>(t.iter.back());
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (static_cast<double>(t.iter[i]) >= start)
            for (std::size_t m = 0; m < 4; ++m)
                worst = std::max(worst, rel_err(t.rate_at(i)[m], p.targets()[m]));
    return {variation < kLambdaVariation && worst > kHoverRateError,
            fmt::format("final 10% lambda variation {:.3g}, worst average-rate error {:.3g}", variation, worst)};
}

Outcome online_locking()
{
    double gap[2] = {0.0, 0.0};
    const double betas[2] = {2e-3, 1e-2};
    for (int b = 0; b < 2; ++b)
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const FadingModel fm = FadingModel::uniform(4, 16, snr_db_to_gain(6.0), seed);
            const Problem p(PowerRateModel(OutageCapacity{}), build_equiprobable(fm, 4), {1, 1, 1, 1},
                            {4, 8, 12, 16});
            SolverConfig cfg;
            cfg.step = betas[b];
            cfg.max_iters = 9999;
            cfg.tol.assign(4, 1e-300); // run the full horizon
            const SolveResult off = run_offline_smooth(p, cfg);
            const SolveResult on = run_online(p, fm, cfg, 10000);
            double sup = 0.0;
            for (std::size_t i = 0; i < on.trajectory.size(); ++i)
                for (std::size_t m = 0; m < 4; ++m)
                    sup = std::max(sup, std::abs(on.trajectory.lambda_at(i)[m] - off.trajectory.lambda_at(i)[m]));
            gap[b] += sup / 5.0;
        }
    return {gap[0] < gap[1], fmt::format("mean sup gap beta 2e-3: {:.4g}, beta 1e-2: {:.4g}", gap[0], gap[1])};
}

Outcome online_primal()
{
    const ExperimentConfig c = load_config(config_dir + "/testcase2.json");
    const Problem p = build_problem(c);
    const SolveResult r = run_online(p, make_fading(c), c.solver, c.blocks);
    double worst = 0.0;
    for (std::size_t m = 0; m < p.users(); ++m)
        worst = std::max(worst, rel_err(r.final_eval.rate[m], p.targets()[m]));
    return {worst <= kOnlineRateError, fmt::format("worst sample-average rate error {:.3g} after {} blocks", worst,
                                                   c.blocks)};
}

Outcome scheme_ordering()
{
    const ExperimentConfig c = load_config(config_dir + "/testcase3_compare.json");
    SchemeSetup s = make_scheme_setup(c);
    s.snr_db = 6.0;
    const SolveResult smooth = smooth_reference(s);
    const SchemeResult ra2 = run_ra2(s, smooth);
    const SchemeResult ra3 = run_ra3(s, smooth);
    const SchemeResult ra5 = run_ra5(s);
    const double bound = static_cast<double>(s.channels) * s.solver.eps;
    const double diff = std::abs(ra3.weighted_power - ra2.weighted_power);
    const bool ok = smooth.converged && ra2.ok && ra3.ok && ra5.ok && ra3.power_db <= ra5.power_db - kSchemeMarginDb &&
                    diff <= bound;
    return {ok, fmt::format("RA3 {:.2f} dB, RA5 {:.2f} dB, RA2 {:.2f} dB, |RA3-RA2| {:.3g} (K eps = {})",
                            ra3.power_db, ra5.power_db, ra2.power_db, diff, bound)};
}

Outcome region_sweep()
{
    const ExperimentConfig c = load_config(config_dir + "/sweep_regions.json");
    const SweepResult r = sweep_regions(make_scheme_setup(c), c.sweep.regions);
    bool decreasing = true, converged = true;
    std::string col;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        converged = converged && r.rows[i].converged;
        if (i > 0)
            decreasing = decreasing && r.rows[i].power_db < r.rows[i - 1].power_db;
        col += fmt::format("{}{:.2f}", i ? "/" : "", r.rows[i].power_db);
    }
    const double gap_lo = r.rows.front().power_db - r.reference_db;
    const double gap_hi = r.rows.back().power_db - r.reference_db;
    return {decreasing && converged && gap_hi < gap_lo,
            fmt::format("L 2..8: {} dB, L=256 proxy {:.2f} dB, gaps {:.2f} vs {:.2f}", col, r.reference_db, gap_hi,
                        gap_lo)};
}

Outcome oracle_equivalence()
{
    // M = 1: one channel, two regions, 0 dB
    double worst_bisection = 0.0;
    for (double target : {0.5, 2.0, 3.5}) {
        const FadingModel fm = FadingModel::uniform(1, 1, 1.0, 1);
        const Problem p(PowerRateModel(OutageCapacity{}), build_equiprobable(fm, 2), {1.0}, {target});
        const double ref = testing::bisection_lambda(target, 0.5, std::log(2.0), 1.0, 12.0);
        SolverConfig cfg;
        cfg.step = 1.5 * ref * std::log(2.0);
        cfg.tol = {1e-9};
        cfg.max_iters = 10000;
        const SolveResult r = run_offline_smooth(p, cfg);
        worst_bisection = std::max(worst_bisection, r.converged ? rel_err(r.lambda[0], ref) : 1.0);
    }

    double worst_lp = 0.0;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const TieProblem tp = testing::example2_instance(seed);
        const double ref = testing::vertex_enumeration_tie_lp(tp);
        worst_lp = std::max(worst_lp, rel_err(solve_tie_lp(tp).weighted_power, ref));
    }

    const FadingModel fm = FadingModel::per_user({2.0, 2.7, 3.4}, 4, 7);
    const Problem p(PowerRateModel(OutageCapacity{}), build_equiprobable(fm, 4), {1, 1, 1}, {2.0, 3.0, 4.0});
    const std::vector<double> lam{1.1, 1.6, 2.3};
    const DualEvaluation exact = exact_dual(p, lam, ScheduleMode::smooth, 0.05);
    const std::size_t N = 20000;
    std::vector<double> sum(3, 0.0), sq(3, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        const auto g = stochastic_subgradient(p, lam, quantize(p.grid(), sample_gains(fm, n)), 0.05);
        for (std::size_t m = 0; m < 3; ++m) {
            sum[m] += g[m];
            sq[m] += g[m] * g[m];
        }
    }
    double worst_sigma = 0.0;
    for (std::size_t m = 0; m < 3; ++m) {
        const double mean = sum[m] / N;
        const double se = std::sqrt((sq[m] / N - mean * mean) / N);
        worst_sigma = std::max(worst_sigma, std::abs(mean - exact.subgradient[m]) / se);
    }
    return {worst_bisection <= kBisectionTol && worst_lp <= kTieLpTol && worst_sigma <= kMonteCarloSigmas,
            fmt::format("bisection rel err {:.2g}, tie LP rel err {:.2g}, MC deviation {:.2f} sigma", worst_bisection,
                        worst_lp, worst_sigma)};
}

double region_average(const RegionContext &ctx, const std::function<double(double)> &f)
{
    const double W = (ctx.upper - ctx.lower) / ctx.mean_gain;
    auto integrand = [&](double t) { return f(ctx.lower + ctx.mean_gain * t) * std::exp(-t); };
    if (std::isinf(W))
        return boost::math::quadrature::exp_sinh<double>().integrate(integrand, 0.0,
                                                                      std::numeric_limits<double>::infinity(), 1e-14);
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, W, 20, 1e-14) /
           -std::expm1(-W);
}

Outcome numerical_suite()
{
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<RegionContext> regions{{0.7, 2.1, 2.0}, {2.1, inf, 2.0}, {0.05, 0.06, 0.5}, {3.0, inf, 10.0}};
    const std::vector<PowerRateModel> families{PowerRateModel(OutageCapacity{}), PowerRateModel(ErgodicCapacity{}),
                                               PowerRateModel(MaxInstBer{}), PowerRateModel(MaxAvgBer{})};
    int convexity_fail = 0;
    double worst_fd = 0.0;
    for (const auto &model : families)
        for (const auto &ctx : regions) {
            const RegionCurve c(model, ctx);
            for (double x = 0.05; x + 0.05 <= 8.0; x += 0.25)
                if (!(c.power(x + 0.05) - 2.0 * c.power(x) + c.power(x - 0.05) > 0.0))
                    ++convexity_fail;
            for (double x : {0.3, 1.0, 2.5, 5.0, 9.0}) {
                const double h = 1e-5 * x;
                const double fd = (c.power(x + h) - c.power(x - h)) / (2.0 * h);
                worst_fd = std::max(worst_fd, rel_err(c.marginal_power(x), fd));
            }
        }

    double worst_quad = 0.0;
    const PowerRateModel ergodic(ErgodicCapacity{});
    for (const auto &ctx : regions) {
        const RegionCurve c(ergodic, ctx);
        for (double y : {1e-5, 1e-3, 0.05, 0.5, 3.0, 40.0, 1e3}) {
            const double quad = region_average(ctx, [&](double g) { return std::log2(1.0 + y * g); });
            worst_quad = std::max(worst_quad, rel_err(c.rate(y), quad));
        }
    }

    // interior point: the smooth optimum of the reference instance
    const Problem p = tc1_problem();
    SolverConfig cfg;
    cfg.step = 5e-3;
    const SolveResult r = run_offline_smooth(p, cfg);
    const JacobianReport jac = jacobian_check(p, r.lambda, 0.05);
    const double top = jac.sym_eigenvalues.maxCoeff();

    return {convexity_fail == 0 && worst_fd <= kFiniteDiffTol && worst_quad <= kQuadratureTol && top < 0.0,
            fmt::format("convexity failures {}, marginal vs FD {:.2g}, ergodic vs quadrature {:.2g}, "
                        "largest Jacobian eigenvalue {:.3g}",
                        convexity_fail, worst_fd, worst_quad, top)};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"duality gap bound", duality_gap_bound},
        {"smooth convergence at beta 1e-2", smooth_convergence},
        {"non-smooth hovering", nonsmooth_hovering},
        {"online locking", online_locking},
        {"online primal convergence", online_primal},
        {"scheme ordering", scheme_ordering},
        {"region sweep", region_sweep},
        {"oracle equivalence", oracle_equivalence},
        {"numerical analysis suite", numerical_suite},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        failed += o.pass ? 0 : 1;
        fmt::print("criterion {} [{}]: {} ({})\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
