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

#include "qsched/channel.hpp"
#include "qsched/dual.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace qsched {

enum class HardEvaluator { enumerate, sorted };

struct SolverConfig {
    double step = 1e-2;               // constant step of the smooth and online iterations
    double nonsmooth_kappa = 1e-2;    // diminishing step kappa * i^-exponent
    double nonsmooth_exponent = 0.51;
    std::vector<double> init;         // starting lambda, one per user
    std::vector<double> tol;          // per-user gradient tolerance
    std::size_t max_iters = 200000;
    double eps = 0.05;
    double online_rate_tol = 0.05;    // relative sample-average rate error accepted by run_online
    std::size_t record_every = 1;     // trajectory down-sampling
    HardEvaluator hard_evaluator = HardEvaluator::enumerate;

    // Called every progress_every iterations when set.
    std::function<void(std::size_t, std::span<const double>, const DualEvaluation &)> progress;
    std::size_t progress_every = 0;

    // Fills init and tol with defaults (0.1 and 1e-3) where empty and checks sizes.
    void finalize(std::size_t users);
};

// Down-sampled iterates. Row i holds users values in each flat vector.
struct Trajectory {
    std::size_t users = 0;
    std::vector<std::size_t> iter;
    std::vector<double> lambda;
    std::vector<double> subgradient;
    std::vector<double> rate;
    std::vector<double> power;  // weighted power sum_m mu_m p_m
    std::vector<double> value;  // dual value (offline only)

    std::size_t size() const noexcept { return iter.size(); }
    std::span<const double> lambda_at(std::size_t i) const { return {lambda.data() + i * users, users}; }
    std::span<const double> rate_at(std::size_t i) const { return {rate.data() + i * users, users}; }
    std::span<const double> subgradient_at(std::size_t i) const { return {subgradient.data() + i * users, users}; }
    void push(std::size_t it, std::span<const double> lam, std::span<const double> sub, std::span<const double> r,
              double pw, double val);
};

// iter,lambda_1..M,subgrad_1..M,rate_1..M,power
void write_trajectory_csv(std::ostream &os, const Trajectory &t);

struct SolveResult {
    std::vector<double> lambda;   // last iterate
    DualEvaluation final_eval;    // evaluation at the last iterate
    bool converged = false;
    std::size_t iterations = 0;
    Trajectory trajectory;
    std::vector<double> best_lambda; // highest dual value seen
    double best_value = 0.0;
};

// Projected gradient ascent on the smoothed dual with constant step. Stops
// when every user's gradient is within tol, users at lambda = 0 with surplus
// rate counting as satisfied.
SolveResult run_offline_smooth(const Problem &problem, const SolverConfig &cfg);

// Projected subgradient ascent on the hard dual with steps kappa * i^-exponent.
// converged reports whether lambda moved by less than 1% over the last 10%
// of the iterations.
SolveResult run_offline_nonsmooth(const Problem &problem, const SolverConfig &cfg);

// One smooth update per fading block from the realized QCSI. The trajectory
// holds running sample averages of rate and weighted power. converged reports
// whether every final sample-average rate is within online_rate_tol of its
// target, surplus counting as met for users at lambda = 0.
SolveResult run_online(const Problem &problem, const FadingModel &fading, const SolverConfig &cfg,
                       std::size_t blocks);

// Maximum relative spread of each lambda over the trailing fraction of a
// trajectory: max_m (max - min) / max(|mean|, floor).
double trailing_lambda_variation(const Trajectory &t, double fraction, double floor = 1e-12);

} // namespace qsched
