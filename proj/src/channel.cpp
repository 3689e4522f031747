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

#include "qsched/channel.hpp"
#include "qsched/errors.hpp"

#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace qsched {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void check_mean_gains(const Matrix<double> &g)
{
    if (g.rows() == 0 || g.cols() == 0)
        throw ConfigError("fading model needs at least one user and one channel");
    for (double v : g.data())
        if (!std::isfinite(v) || v <= 0.0)
            throw ConfigError(fmt::format("mean gain must be finite and positive, got {}", v));
}

} // namespace

double snr_db_to_gain(double snr_db)
{
    if (!std::isfinite(snr_db))
        throw ConfigError("SNR must be finite");
    return std::pow(10.0, snr_db / 10.0);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ index);
    // 53 random bits mapped to (0, 1]
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

FadingModel::FadingModel(Matrix<double> mean_gain, std::uint64_t seed)
    : mean_gain_(std::move(mean_gain)), seed_(seed)
{
    check_mean_gains(mean_gain_);
}

FadingModel FadingModel::uniform(std::size_t users, std::size_t channels, double mean_gain,
                                 std::uint64_t seed)
{
    return FadingModel(Matrix<double>(users, channels, mean_gain), seed);
}

FadingModel FadingModel::per_user(const std::vector<double> &mean_gain, std::size_t channels,
                                  std::uint64_t seed)
{
    Matrix<double> g(mean_gain.size(), channels);
    for (std::size_t m = 0; m < mean_gain.size(); ++m)
        for (std::size_t k = 0; k < channels; ++k)
            g(m, k) = mean_gain[m];
    return FadingModel(std::move(g), seed);
}

FadingModel FadingModel::from_taps(std::size_t users, std::size_t channels, double snr_lin,
                                   const std::vector<double> &tap_powers, std::uint64_t seed)
{
    if (tap_powers.empty())
        throw ConfigError("tap profile is empty");
    for (double p : tap_powers)
        if (!std::isfinite(p) || p < 0.0)
            throw ConfigError("tap powers must be finite and non-negative");
    const double total = std::accumulate(tap_powers.begin(), tap_powers.end(), 0.0);
    return uniform(users, channels, snr_lin * total, seed);
}

Matrix<double> sample_gains(const FadingModel &model, std::uint64_t block)
{
    const std::size_t M = model.users(), K = model.channels();
    Matrix<double> g(M, K);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < K; ++k) {
            const double u = counter_uniform(model.seed(), block, m * K + k);
            g(m, k) = -model.mean_gain(m, k) * std::log(u);
        }
    return g;
}

} // namespace qsched
