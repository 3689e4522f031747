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

#include "qsched/quantizer.hpp"
#include "qsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

namespace qsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_ladder(std::span<const double> q, std::size_t m, std::size_t k)
{
    if (q.front() != 0.0)
        throw ConfigError(fmt::format("ladder ({}, {}) must start at 0", m, k));
    if (q.back() != kInf)
        throw ConfigError(fmt::format("ladder ({}, {}) must end at +inf", m, k));
    for (std::size_t l = 1; l < q.size(); ++l)
        if (!(q[l] > q[l - 1]) || std::isnan(q[l]))
            throw ConfigError(fmt::format("ladder ({}, {}) is not strictly increasing at {}", m, k, l));
}

} // namespace

double RegionContext::probability() const
{
    const double a = lower / mean_gain;
    if (upper == kInf)
        return std::exp(-a);
    // e^{-a} (1 - e^{-(b-a)}) avoids cancellation on narrow regions
    return -std::exp(-a) * std::expm1(-(upper - lower) / mean_gain);
}

QuantizerGrid::QuantizerGrid(std::size_t regions, std::vector<double> thresholds,
                             Matrix<double> mean_gain)
    : regions_(regions), thresholds_(std::move(thresholds)), mean_gain_(std::move(mean_gain))
{
    if (regions_ == 0)
        throw ConfigError("quantizer needs at least one region");
    if (regions_ > std::numeric_limits<std::uint32_t>::max() / 2)
        throw ConfigError("too many quantization regions");
    if (users() == 0 || channels() == 0)
        throw ConfigError("quantizer needs at least one user and one channel");
    if (thresholds_.size() != users() * channels() * (regions_ + 1))
        throw ConfigError(fmt::format("expected {} thresholds, got {}",
                                      users() * channels() * (regions_ + 1), thresholds_.size()));
    for (double g : mean_gain_.data())
        if (!std::isfinite(g) || g <= 0.0)
            throw ConfigError("mean gain must be finite and positive");
    for (std::size_t m = 0; m < users(); ++m)
        for (std::size_t k = 0; k < channels(); ++k)
            check_ladder(ladder(m, k), m, k);
}

std::span<const double> QuantizerGrid::ladder(std::size_t m, std::size_t k) const
{
    return std::span<const double>(thresholds_).subspan((m * channels() + k) * (regions_ + 1),
                                                         regions_ + 1);
}

RegionContext QuantizerGrid::context(std::size_t m, std::size_t k, std::size_t l) const
{
    const auto q = ladder(m, k);
    return RegionContext{q[l], q[l + 1], mean_gain_(m, k)};
}

double QuantizerGrid::region_prob(std::size_t m, std::size_t k, std::size_t l) const
{
    return context(m, k, l).probability();
}

bool QuantizerGrid::same_channel_statistics(std::size_t k, std::size_t k2) const
{
    for (std::size_t m = 0; m < users(); ++m) {
        if (mean_gain_(m, k) != mean_gain_(m, k2))
            return false;
        const auto a = ladder(m, k), b = ladder(m, k2);
        if (!std::equal(a.begin(), a.end(), b.begin()))
            return false;
    }
    return true;
}

QuantizerGrid build_equiprobable(const FadingModel &model, std::size_t regions)
{
    if (regions == 0)
        throw ConfigError("quantizer needs at least one region");
    const std::size_t M = model.users(), K = model.channels();
    std::vector<double> q;
    q.reserve(M * K * (regions + 1));
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < K; ++k) {
            const double g = model.mean_gain(m, k);
            q.push_back(0.0);
            for (std::size_t l = 1; l < regions; ++l)
                q.push_back(-g * std::log1p(-static_cast<double>(l) / static_cast<double>(regions)));
            q.push_back(kInf);
        }
    return QuantizerGrid(regions, std::move(q), model.mean_gains());
}

QuantizerGrid build_random(const FadingModel &model, std::size_t regions, double gain_max,
                           std::uint64_t seed)
{
    if (regions == 0)
        throw ConfigError("quantizer needs at least one region");
    if (!std::isfinite(gain_max) || gain_max <= 0.0)
        throw ConfigError("random quantizer range must be finite and positive");
    const std::size_t M = model.users(), K = model.channels();
    std::vector<double> q;
    q.reserve(M * K * (regions + 1));
    std::vector<double> inner(regions - 1);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t i = 0; i + 1 < regions; ++i) {
                // counter_uniform is in (0, 1]; flip to keep thresholds below gain_max
                const double u = 1.0 - counter_uniform(seed, m * K + k, i);
                inner[i] = gain_max * std::max(u, 0x1.0p-53);
            }
            std::sort(inner.begin(), inner.end());
            q.push_back(0.0);
            q.insert(q.end(), inner.begin(), inner.end());
            q.push_back(kInf);
        }
    return QuantizerGrid(regions, std::move(q), model.mean_gains());
}

QuantizerGrid build_shared_ladder(const FadingModel &model, const std::vector<double> &interior)
{
    const std::size_t M = model.users(), K = model.channels();
    const std::size_t regions = interior.size() + 1;
    std::vector<double> q;
    q.reserve(M * K * (regions + 1));
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < K; ++k) {
            q.push_back(0.0);
            q.insert(q.end(), interior.begin(), interior.end());
            q.push_back(kInf);
        }
    return QuantizerGrid(regions, std::move(q), model.mean_gains());
}

std::uint32_t quantize_gain(std::span<const double> ladder, double g)
{
    if (!(g >= 0.0))
        throw ConfigError(fmt::format("gain must be non-negative, got {}", g));
    const auto it = std::upper_bound(ladder.begin(), ladder.end(), g);
    return static_cast<std::uint32_t>(std::distance(ladder.begin(), it) - 1);
}

Matrix<std::uint32_t> quantize(const QuantizerGrid &grid, const Matrix<double> &gains)
{
    if (gains.rows() != grid.users() || gains.cols() != grid.channels())
        throw ConfigError(fmt::format("gain matrix is {}x{}, grid is {}x{}", gains.rows(),
                                      gains.cols(), grid.users(), grid.channels()));
    Matrix<std::uint32_t> out(gains.rows(), gains.cols());
    for (std::size_t m = 0; m < gains.rows(); ++m)
        for (std::size_t k = 0; k < gains.cols(); ++k)
            out(m, k) = quantize_gain(grid.ladder(m, k), gains(m, k));
    return out;
}

double column_prob(const QuantizerGrid &grid, std::size_t k, std::span<const std::uint32_t> column)
{
    if (column.size() != grid.users())
        throw ConfigError("column length does not match number of users");
    double p = 1.0;
    for (std::size_t m = 0; m < column.size(); ++m)
        p *= grid.region_prob(m, k, column[m]);
    return p;
}

std::size_t column_count(std::size_t users, std::size_t regions, std::size_t budget)
{
    double count = 1.0;
    for (std::size_t m = 0; m < users; ++m)
        count *= static_cast<double>(regions);
    if (count > static_cast<double>(budget))
        throw BudgetError(fmt::format("{}^{} = {:.3g} columns exceeds the enumeration budget of {}",
                                      regions, users, count, budget),
                          count, budget);
    return static_cast<std::size_t>(count);
}

ColumnEnumerator::iterator &ColumnEnumerator::iterator::operator++()
{
    ++index_;
    for (std::size_t m = column_.size(); m-- > 0;) {
        if (++column_[m] < regions_)
            break;
        column_[m] = 0;
    }
    return *this;
}

ColumnEnumerator::ColumnEnumerator(std::size_t users, std::size_t regions, std::size_t budget)
    : users_(users), regions_(regions), count_(column_count(users, regions, budget))
{
    if (users == 0 || regions == 0)
        throw ConfigError("enumeration needs at least one user and one region");
}

ColumnEnumerator::iterator ColumnEnumerator::begin() const
{
    return iterator(users_, static_cast<std::uint32_t>(regions_), 0);
}

ColumnEnumerator::iterator ColumnEnumerator::end() const
{
    return iterator(0, static_cast<std::uint32_t>(regions_), count_);
}

ColumnEnumerator enumerate_columns(std::size_t users, std::size_t regions, std::size_t budget)
{
    return ColumnEnumerator(users, regions, budget);
}

nlohmann::json grid_to_json(const QuantizerGrid &grid)
{
    nlohmann::json mean = nlohmann::json::array();
    nlohmann::json thr = nlohmann::json::array();
    for (std::size_t m = 0; m < grid.users(); ++m) {
        nlohmann::json mean_row = nlohmann::json::array();
        nlohmann::json thr_row = nlohmann::json::array();
        for (std::size_t k = 0; k < grid.channels(); ++k) {
            mean_row.push_back(grid.mean_gain(m, k));
            nlohmann::json ladder = nlohmann::json::array();
            for (double q : grid.ladder(m, k)) {
                if (q == kInf)
                    ladder.push_back("inf");
                else
                    ladder.push_back(q);
            }
            thr_row.push_back(std::move(ladder));
        }
        mean.push_back(std::move(mean_row));
        thr.push_back(std::move(thr_row));
    }
    return {{"users", grid.users()},
            {"channels", grid.channels()},
            {"regions", grid.regions()},
            {"mean_gain", std::move(mean)},
            {"thresholds", std::move(thr)}};
}

QuantizerGrid grid_from_json(const nlohmann::json &j)
{
    try {
        const auto M = j.at("users").get<std::size_t>();
        const auto K = j.at("channels").get<std::size_t>();
        const auto L = j.at("regions").get<std::size_t>();
        Matrix<double> mean(M, K);
        std::vector<double> q;
        q.reserve(M * K * (L + 1));
        const auto &jm = j.at("mean_gain");
        const auto &jt = j.at("thresholds");
        if (jm.size() != M || jt.size() != M)
            throw ConfigError("quantizer JSON row count does not match users");
        for (std::size_t m = 0; m < M; ++m) {
            if (jm[m].size() != K || jt[m].size() != K)
                throw ConfigError("quantizer JSON column count does not match channels");
            for (std::size_t k = 0; k < K; ++k) {
                mean(m, k) = jm[m][k].get<double>();
                const auto &ladder = jt[m][k];
                if (ladder.size() != L + 1)
                    throw ConfigError("quantizer JSON ladder has wrong length");
                for (const auto &v : ladder) {
                    if (v.is_string()) {
                        if (v.get<std::string>() != "inf")
                            throw ConfigError("only the string \"inf\" is accepted as a threshold");
                        q.push_back(kInf);
                    } else {
                        q.push_back(v.get<double>());
                    }
                }
            }
        }
        return QuantizerGrid(L, std::move(q), std::move(mean));
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(fmt::format("malformed quantizer JSON: {}", e.what()));
    }
}

} // namespace qsched
