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

#include "qsched/region.hpp"

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace qsched {

// Outage capacity at the delta-quantile gain of the region. delta = 0 uses
// the region's lower threshold.
struct OutageCapacity {
    double outage_delta = 0.0;
};

// Ergodic capacity averaged over the gain distribution inside the region.
struct ErgodicCapacity {};

// Instantaneous BER kappa1 * exp(-kappa2 * g * p / (2^r - 1)) at most ber_max
// for every gain in the region.
struct MaxInstBer {
    double kappa1 = 0.2;
    double kappa2 = 1.5;
    double ber_max = 1e-3;
};

// The same BER expression averaged over the region is at most ber_avg.
struct MaxAvgBer {
    double kappa1 = 0.2;
    double kappa2 = 1.5;
    double ber_avg = 1e-3;
};

struct NumericSettings {
    double rate_cap = 12.0;  // upper bound on any allocated rate, bits/s/Hz
    double root_tol = 1e-10; // residual accepted by root finders
    int max_iter = 200;
};

// Power-rate function family shared by all users, plus numeric settings.
class PowerRateModel {
public:
    using Family = std::variant<OutageCapacity, ErgodicCapacity, MaxInstBer, MaxAvgBer>;

    explicit PowerRateModel(Family family = OutageCapacity{}, NumericSettings numerics = {});

    const Family &family() const noexcept { return family_; }
    const NumericSettings &numerics() const noexcept { return numerics_; }
    std::string_view name() const;

private:
    Family family_;
    NumericSettings numerics_;
};

struct RatePower {
    double rate = 0.0;
    double power = 0.0;
};

// Power-rate curve of one region with all region constants precomputed.
// Power y = P(x) is increasing and convex in rate x with P(0) = 0.
class RegionCurve {
public:
    RegionCurve(const PowerRateModel &model, const RegionContext &ctx);

    // No positive rate is achievable with finite power.
    bool outage() const noexcept { return outage_; }

    // g_eff for families of the form (2^x - 1) / g_eff. Empty for ergodic.
    std::optional<double> effective_gain() const;

    double power(double rate) const;
    double rate(double power) const;
    double marginal_power(double rate) const;
    // Rate maximizing t * x - P(x), clipped to [0, rate_cap].
    double inv_marginal_power(double t) const;
    // inv_marginal_power(t) together with the power it needs.
    RatePower optimum(double t) const;
    double rate_cap() const noexcept { return numerics_.rate_cap; }

private:
    double ergodic_rate(double y) const;
    double ergodic_slope(double y) const;
    bool use_series(double y) const;

    NumericSettings numerics_;
    bool ergodic_ = false;
    bool outage_ = false;
    double g_eff_ = 0.0;

    // ergodic constants, scaled by e^{a/mean}
    double a_ = 0.0, b_ = 0.0, mean_ = 1.0;
    double tail_ = 0.0;    // e^{-(b-a)/mean}
    double prob_s_ = 1.0;  // 1 - tail_
    double y_cap_ = 0.0;   // power at rate_cap
    std::vector<double> moments_; // E[g^n | region], n = 1..
};

// delta-quantile gain of the region (lower threshold for delta = 0).
double delta_outage_gain(const RegionContext &ctx, double delta);

// Solves the average-BER condition for z* = 1 + kappa2 * mean * p / (2^r - 1)
// and returns the effective gain mean * kappa2 / (z* - 1).
double avg_ber_effective_gain(const RegionContext &ctx, const MaxAvgBer &p, const NumericSettings &n);

double power_of_rate(const PowerRateModel &model, const RegionContext &ctx, double rate);
double rate_of_power(const PowerRateModel &model, const RegionContext &ctx, double power);
double marginal_power(const PowerRateModel &model, const RegionContext &ctx, double rate);
double inv_marginal_power(const PowerRateModel &model, const RegionContext &ctx, double t);
bool is_outage(const PowerRateModel &model, const RegionContext &ctx);

} // namespace qsched
