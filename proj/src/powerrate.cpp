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

#include "qsched/powerrate.hpp"
#include "qsched/errors.hpp"
#include "qsched/special_functions.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <tuple>

#include <boost/math/tools/roots.hpp>
#include <fmt/core.h>

namespace qsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

// Series terms used by the ergodic curve when y * (a + mean) is small.
constexpr unsigned kSeriesTerms = 8;
constexpr double kSeriesSwitch = 1e-3;
constexpr int kRootBits = 46;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_context(const RegionContext &ctx)
{
    if (!(ctx.mean_gain > 0.0) || !std::isfinite(ctx.mean_gain))
        throw ConfigError("region mean gain must be finite and positive");
    if (!(ctx.lower >= 0.0) || !std::isfinite(ctx.lower) || !(ctx.upper > ctx.lower))
        throw ConfigError(fmt::format("invalid region [{}, {})", ctx.lower, ctx.upper));
}

void check_ber(double kappa1, double kappa2, double target, const char *name)
{
    if (!(kappa1 > 0.0) || !(kappa2 > 0.0) || !std::isfinite(kappa1) || !std::isfinite(kappa2))
        throw ConfigError(fmt::format("{}: kappa1 and kappa2 must be positive", name));
    if (!(target > 0.0) || !(target < kappa1))
        throw ConfigError(fmt::format("{}: BER target must lie in (0, kappa1)", name));
}

} // namespace

PowerRateModel::PowerRateModel(Family family, NumericSettings numerics)
    : family_(family), numerics_(numerics)
{
    if (!(numerics_.rate_cap > 0.0) || !std::isfinite(numerics_.rate_cap))
        throw ConfigError("rate_cap must be finite and positive");
    if (!(numerics_.root_tol > 0.0) || numerics_.root_tol >= 1.0)
        throw ConfigError("root_tol must lie in (0, 1)");
    if (numerics_.max_iter < 1)
        throw ConfigError("max_iter must be at least 1");
    std::visit(overloaded{
                   [](const OutageCapacity &p) {
                       if (!(p.outage_delta >= 0.0) || !(p.outage_delta < 1.0))
                           throw ConfigError("outage_delta must lie in [0, 1)");
                   },
                   [](const ErgodicCapacity &) {},
                   [](const MaxInstBer &p) { check_ber(p.kappa1, p.kappa2, p.ber_max, "max_inst_ber"); },
                   [](const MaxAvgBer &p) { check_ber(p.kappa1, p.kappa2, p.ber_avg, "max_avg_ber"); },
               },
               family_);
}

std::string_view PowerRateModel::name() const
{
    return std::visit(overloaded{
                          [](const OutageCapacity &) { return std::string_view("outage_capacity"); },
                          [](const ErgodicCapacity &) { return std::string_view("ergodic_capacity"); },
                          [](const MaxInstBer &) { return std::string_view("max_inst_ber"); },
                          [](const MaxAvgBer &) { return std::string_view("max_avg_ber"); },
                      },
                      family_);
}

double delta_outage_gain(const RegionContext &ctx, double delta)
{
    if (delta == 0.0)
        return ctx.lower;
    // -mean * ln((1-d) e^{-a/mean} + d e^{-b/mean}), factored around a
    const double width = (ctx.upper - ctx.lower) / ctx.mean_gain;
    return ctx.lower - ctx.mean_gain * std::log1p(delta * std::expm1(-width));
}

double avg_ber_effective_gain(const RegionContext &ctx, const MaxAvgBer &p, const NumericSettings &n)
{
    const double A = ctx.lower / ctx.mean_gain;
    const double W = (ctx.upper - ctx.lower) / ctx.mean_gain; // may be +inf
    const double log_target = std::log(p.ber_avg / p.kappa1);
    const double log_norm = std::isinf(W) ? 0.0 : std::log(-std::expm1(-W));

    // log of the region-averaged BER relative to kappa1, decreasing in z, zero at z = 1
    auto h = [&](double z) {
        const double tail = std::isinf(W) ? 0.0 : std::log(-std::expm1(-W * z));
        return -A * (z - 1.0) + tail - std::log(z) - log_norm - log_target;
    };

    double lo = 1.0, hi = 2.0;
    double h_lo = h(lo), h_hi = h(hi);
    int grow = 0;
    while (h_hi > 0.0) {
        lo = hi;
        h_lo = h_hi;
        hi *= 2.0;
        h_hi = h(hi);
        if (++grow > 2000)
            throw NumericError("average-BER bracket search failed", h_hi);
    }
    std::uintmax_t iters = static_cast<std::uintmax_t>(n.max_iter);
    const auto r = boost::math::tools::toms748_solve(h, lo, hi, h_lo, h_hi,
                                                      boost::math::tools::eps_tolerance<double>(kRootBits), iters);
    const double z = 0.5 * (r.first + r.second);
    const double res = h(z);
    if (std::abs(res) > n.root_tol * std::max(1.0, std::abs(log_target)))
        throw NumericError(fmt::format("average-BER root residual {} too large", res), res);
    return ctx.mean_gain * p.kappa2 / (z - 1.0);
}

RegionCurve::RegionCurve(const PowerRateModel &model, const RegionContext &ctx)
    : numerics_(model.numerics())
{
    check_context(ctx);
    std::visit(overloaded{
                   [&](const OutageCapacity &p) { g_eff_ = delta_outage_gain(ctx, p.outage_delta); },
                   [&](const MaxInstBer &p) {
                       g_eff_ = p.kappa2 * ctx.lower / std::log(p.kappa1 / p.ber_max);
                   },
                   [&](const MaxAvgBer &p) { g_eff_ = avg_ber_effective_gain(ctx, p, numerics_); },
                   [&](const ErgodicCapacity &) {
                       ergodic_ = true;
                       a_ = ctx.lower;
                       b_ = ctx.upper;
                       mean_ = ctx.mean_gain;
                       const double A = a_ / mean_;
                       const double W = (b_ - a_) / mean_;
                       tail_ = std::isinf(W) ? 0.0 : std::exp(-W);
                       prob_s_ = std::isinf(W) ? 1.0 : -std::expm1(-W);
                       const double B = A + W;
                       moments_.resize(kSeriesTerms + 1);
                       double scale = 1.0;
                       for (unsigned j = 1; j <= kSeriesTerms + 1; ++j) {
                           scale *= mean_ * j;
                           const double upper = tail_ == 0.0 ? 0.0 : tail_ * truncated_exp_series(j, B);
                           moments_[j - 1] = scale * (truncated_exp_series(j, A) - upper) / prob_s_;
                       }
                       y_cap_ = power(numerics_.rate_cap);
                   },
               },
               model.family());
    if (!ergodic_)
        outage_ = !(g_eff_ > 0.0);
}

std::optional<double> RegionCurve::effective_gain() const
{
    if (ergodic_)
        return std::nullopt;
    return g_eff_;
}

bool RegionCurve::use_series(double y) const
{
    return y * (a_ + mean_) < kSeriesSwitch;
}

double RegionCurve::ergodic_rate(double y) const
{
    if (y == 0.0)
        return 0.0;
    if (use_series(y)) {
        double sum = 0.0, yn = 1.0;
        for (unsigned n = 1; n <= kSeriesTerms; ++n) {
            yn *= y;
            const double term = yn * moments_[n - 1] / n;
            sum += (n % 2 == 1) ? term : -term;
        }
        return sum / kLn2;
    }
    const double ym = y * mean_;
    const double ta = std::log1p(y * a_) + expint_e1_scaled((1.0 + y * a_) / ym);
    double tb = 0.0;
    if (tail_ != 0.0)
        tb = tail_ * (std::log1p(y * b_) + expint_e1_scaled((1.0 + y * b_) / ym));
    return (ta - tb) / (prob_s_ * kLn2);
}

double RegionCurve::ergodic_slope(double y) const
{
    if (use_series(y)) {
        double sum = 0.0, yn = 1.0;
        for (unsigned n = 1; n <= kSeriesTerms; ++n) {
            const double term = yn * moments_[n - 1];
            sum += (n % 2 == 1) ? term : -term;
            yn *= y;
        }
        return sum / kLn2;
    }
    const double ym = y * mean_;
    double j = expint_e1_scaled((1.0 + y * a_) / ym);
    if (tail_ != 0.0)
        j -= tail_ * expint_e1_scaled((1.0 + y * b_) / ym);
    return (1.0 - j / (ym * prob_s_)) / (y * kLn2);
}

double RegionCurve::power(double rate) const
{
    if (!(rate >= 0.0))
        throw ConfigError(fmt::format("rate must be non-negative, got {}", rate));
    if (rate == 0.0)
        return 0.0;
    if (!ergodic_) {
        if (outage_)
            return kInf;
        return std::expm1(rate * kLn2) / g_eff_;
    }
    // Jensen: rate(y0) <= rate at y0 = (2^x - 1) / E[g | region]
    const double lo0 = std::expm1(rate * kLn2) / moments_[0];
    double lo = lo0, hi = 2.0 * lo0;
    int grow = 0;
    while (ergodic_rate(hi) < rate) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 2000)
            throw NumericError("ergodic power bracket search failed", rate);
    }
    auto f = [&](double y) { return std::make_tuple(ergodic_rate(y) - rate, ergodic_slope(y)); };
    std::uintmax_t iters = static_cast<std::uintmax_t>(numerics_.max_iter);
    const double y = boost::math::tools::newton_raphson_iterate(f, 0.5 * (lo + hi), lo, hi, kRootBits, iters);
    const double res = ergodic_rate(y) - rate;
    if (std::abs(res) > numerics_.root_tol * std::max(1.0, rate))
        throw NumericError(fmt::format("ergodic power root residual {} too large at rate {}", res, rate), res);
    return y;
}

double RegionCurve::rate(double power) const
{
    if (!(power >= 0.0))
        throw ConfigError(fmt::format("power must be non-negative, got {}", power));
    if (ergodic_)
        return ergodic_rate(power);
    if (outage_)
        return 0.0;
    return std::log1p(power * g_eff_) / kLn2;
}

double RegionCurve::marginal_power(double rate) const
{
    if (!(rate >= 0.0))
        throw ConfigError(fmt::format("rate must be non-negative, got {}", rate));
    if (ergodic_)
        return 1.0 / ergodic_slope(power(rate));
    if (outage_)
        return kInf;
    return std::exp2(rate) * kLn2 / g_eff_;
}

double RegionCurve::inv_marginal_power(double t) const
{
    return optimum(t).rate;
}

RatePower RegionCurve::optimum(double t) const
{
    if (!(t >= 0.0))
        throw ConfigError(fmt::format("marginal power must be non-negative, got {}", t));
    if (!ergodic_) {
        if (outage_ || t <= kLn2 / g_eff_)
            return {};
        const double r = std::min(std::log2(t * g_eff_ / kLn2), numerics_.rate_cap);
        return {r, power(r)};
    }
    const double target = 1.0 / t; // slope d rate / d power at the optimum
    // thresholds written as marginal powers so they agree with marginal_power()
    if (t <= 1.0 / ergodic_slope(0.0))
        return {};
    if (t >= 1.0 / ergodic_slope(y_cap_))
        return {numerics_.rate_cap, y_cap_};
    auto f = [&](double y) { return ergodic_slope(y) - target; };
    std::uintmax_t iters = static_cast<std::uintmax_t>(numerics_.max_iter);
    const auto r = boost::math::tools::toms748_solve(
        f, 0.0, y_cap_, boost::math::tools::eps_tolerance<double>(kRootBits), iters);
    const double y = 0.5 * (r.first + r.second);
    if (iters >= static_cast<std::uintmax_t>(numerics_.max_iter))
        throw NumericError("ergodic marginal-power root did not converge", f(y));
    return {std::min(ergodic_rate(y), numerics_.rate_cap), y};
}

double power_of_rate(const PowerRateModel &model, const RegionContext &ctx, double rate)
{
    return RegionCurve(model, ctx).power(rate);
}

double rate_of_power(const PowerRateModel &model, const RegionContext &ctx, double power)
{
    return RegionCurve(model, ctx).rate(power);
}

double marginal_power(const PowerRateModel &model, const RegionContext &ctx, double rate)
{
    return RegionCurve(model, ctx).marginal_power(rate);
}

double inv_marginal_power(const PowerRateModel &model, const RegionContext &ctx, double t)
{
    return RegionCurve(model, ctx).inv_marginal_power(t);
}

bool is_outage(const PowerRateModel &model, const RegionContext &ctx)
{
    return RegionCurve(model, ctx).outage();
}

} // namespace qsched
