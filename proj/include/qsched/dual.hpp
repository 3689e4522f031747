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

#include "qsched/allocator.hpp"
#include "qsched/kernels/column_reduce.hpp"
#include "qsched/matrix.hpp"
#include "qsched/powerrate.hpp"
#include "qsched/quantizer.hpp"

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qsched {

// Static part of the scheduling problem: power-rate family, quantizer,
// power weights mu and rate targets. Channels with identical statistics are
// grouped into classes and evaluated once.
class Problem {
public:
    Problem(PowerRateModel model, QuantizerGrid grid, std::vector<double> mu, std::vector<double> targets,
            std::size_t enumeration_budget = kDefaultEnumerationBudget);

    std::size_t users() const noexcept { return grid_.users(); }
    std::size_t channels() const noexcept { return grid_.channels(); }
    std::size_t regions() const noexcept { return grid_.regions(); }
    const PowerRateModel &model() const noexcept { return model_; }
    const QuantizerGrid &grid() const noexcept { return grid_; }
    const std::vector<double> &mu() const noexcept { return mu_; }
    const std::vector<double> &targets() const noexcept { return targets_; }
    std::size_t enumeration_budget() const noexcept { return budget_; }

    std::size_t classes() const noexcept { return curves_.size(); }
    const ChannelCurves &class_curves(std::size_t c) const { return curves_[c]; }
    double class_multiplicity(std::size_t c) const { return multiplicity_[c]; }
    const std::vector<double> &multiplicities() const noexcept { return multiplicity_; }
    std::size_t class_of(std::size_t k) const { return class_of_[k]; }

    // Validated multipliers for the given lambda.
    Multipliers multipliers(std::span<const double> lambda) const;
    // One table per channel class.
    std::vector<ChannelTable> class_tables(std::span<const double> lambda) const;

private:
    PowerRateModel model_;
    QuantizerGrid grid_;
    std::vector<double> mu_;
    std::vector<double> targets_;
    std::size_t budget_;
    std::vector<ChannelCurves> curves_;
    std::vector<double> multiplicity_;
    std::vector<std::size_t> class_of_;
};

struct DualEvaluation {
    double value = 0.0;
    std::vector<double> subgradient;  // targets - rate
    std::vector<double> rate;         // average rate per user, summed over channels
    std::vector<double> power;        // average power per user, summed over channels
    double weighted_power = 0.0;      // sum_m mu_m * power_m
};

// Dual function by full column enumeration. ScheduleMode::hard gives the
// non-smooth dual with its subgradient, ScheduleMode::smooth the eps-smoothed
// dual with its gradient.
DualEvaluation exact_dual(const Problem &problem, std::span<const double> lambda, ScheduleMode mode,
                          double eps, double tie_tol = kTieTolerance);

// Hard dual from per-user order statistics, O(M^2 L log L) per channel class
// and free of the enumeration budget. Agrees with exact_dual(hard) except on
// columns whose costs differ by less than the tie tolerance.
DualEvaluation hard_dual_sorted(const Problem &problem, std::span<const double> lambda);

// Allocation of one block from its quantized CSI.
struct BlockAllocation {
    std::vector<double> rate;   // per user, summed over channels
    std::vector<double> power;  // per user, summed over channels
    Matrix<double> weights;     // users x channels
};

BlockAllocation allocate_block(const Problem &problem, const std::vector<ChannelTable> &class_tables,
                               const Matrix<std::uint32_t> &qcsi, ScheduleMode mode, double eps,
                               double tie_tol = kTieTolerance);

// targets - rate of the smooth allocation for one realized QCSI matrix.
std::vector<double> stochastic_subgradient(const Problem &problem, std::span<const double> lambda,
                                           const Matrix<std::uint32_t> &qcsi, double eps);

struct JacobianReport {
    Eigen::MatrixXd jacobian;        // d(smooth gradient)/d(lambda)
    Eigen::VectorXd sym_eigenvalues; // of (J + J^T)/2, ascending
    double asymmetry = 0.0;          // max |J - J^T| / 2
};

// Central finite differences of the smooth gradient.
JacobianReport jacobian_check(const Problem &problem, std::span<const double> lambda, double eps,
                              double step = 1e-6);

} // namespace qsched
