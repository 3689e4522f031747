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

#include "qsched/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qsched {

// 10^(snr_db/10)
double snr_db_to_gain(double snr_db);

// Counter-based uniform draw in (0, 1]. The same (seed, stream, index) always
// yields the same value, independent of call order.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Independent Rayleigh block fading: the power gain g[m][k] of user m on
// channel k is exponential with mean mean_gain(m, k), redrawn every block.
class FadingModel {
public:
    FadingModel(Matrix<double> mean_gain, std::uint64_t seed);

    // Every user sees the same mean gain on every channel.
    static FadingModel uniform(std::size_t users, std::size_t channels, double mean_gain,
                               std::uint64_t seed);

    // Per-user mean gains, identical across channels.
    static FadingModel per_user(const std::vector<double> &mean_gain, std::size_t channels,
                                std::uint64_t seed);

    // Multi-tap profile: the per-subcarrier gain of a user is exponential with
    // mean snr_lin * sum(tap_powers). Subcarriers are treated as independent.
    static FadingModel from_taps(std::size_t users, std::size_t channels, double snr_lin,
                                 const std::vector<double> &tap_powers, std::uint64_t seed);

    std::size_t users() const noexcept { return mean_gain_.rows(); }
    std::size_t channels() const noexcept { return mean_gain_.cols(); }
    double mean_gain(std::size_t m, std::size_t k) const { return mean_gain_(m, k); }
    const Matrix<double> &mean_gains() const noexcept { return mean_gain_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    Matrix<double> mean_gain_;
    std::uint64_t seed_;
};

// M x K gain matrix for one block. Deterministic in (model.seed(), block).
Matrix<double> sample_gains(const FadingModel &model, std::uint64_t block);

} // namespace qsched
