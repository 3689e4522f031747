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
#include "qsched/matrix.hpp"
#include "qsched/region.hpp"

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace qsched {

inline constexpr std::size_t kDefaultEnumerationBudget = 1'000'000;

// Per (user, channel) threshold ladders 0 = q_0 < q_1 < ... < q_L = +inf.
// Region l (0-based) is [q_l, q_{l+1}). All ladders share the same L.
class QuantizerGrid {
public:
    // thresholds holds users*channels ladders of regions+1 values, ladder
    // (m, k) starting at offset (m * channels + k) * (regions + 1).
    QuantizerGrid(std::size_t regions, std::vector<double> thresholds, Matrix<double> mean_gain);

    std::size_t users() const noexcept { return mean_gain_.rows(); }
    std::size_t channels() const noexcept { return mean_gain_.cols(); }
    std::size_t regions() const noexcept { return regions_; }

    std::span<const double> ladder(std::size_t m, std::size_t k) const;
    double threshold(std::size_t m, std::size_t k, std::size_t l) const { return ladder(m, k)[l]; }
    double mean_gain(std::size_t m, std::size_t k) const { return mean_gain_(m, k); }
    const Matrix<double> &mean_gains() const noexcept { return mean_gain_; }

    RegionContext context(std::size_t m, std::size_t k, std::size_t l) const;
    double region_prob(std::size_t m, std::size_t k, std::size_t l) const;

    // Channels k and k2 have identical ladders and mean gains for every user.
    bool same_channel_statistics(std::size_t k, std::size_t k2) const;

private:
    std::size_t regions_;
    std::vector<double> thresholds_;
    Matrix<double> mean_gain_;
};

// q_l = -mean * ln(1 - l/L), so every region has probability 1/L.
QuantizerGrid build_equiprobable(const FadingModel &model, std::size_t regions);

// L-1 interior thresholds drawn uniformly on (0, gain_max) and sorted,
// independently for every (user, channel).
QuantizerGrid build_random(const FadingModel &model, std::size_t regions, double gain_max,
                           std::uint64_t seed);

// The same interior thresholds (L-1 values, increasing, positive) for every
// (user, channel).
QuantizerGrid build_shared_ladder(const FadingModel &model, const std::vector<double> &interior);

// Region index of gain g on a ladder.
std::uint32_t quantize_gain(std::span<const double> ladder, double g);

// M x K matrix of region indices.
Matrix<std::uint32_t> quantize(const QuantizerGrid &grid, const Matrix<double> &gains);

// Product of region probabilities of a column on channel k.
double column_prob(const QuantizerGrid &grid, std::size_t k, std::span<const std::uint32_t> column);

// L^M, or BudgetError if it exceeds budget.
std::size_t column_count(std::size_t users, std::size_t regions,
                         std::size_t budget = kDefaultEnumerationBudget);

// All L^M columns in lexicographic order, the last user varying fastest.
class ColumnEnumerator {
public:
    ColumnEnumerator(std::size_t users, std::size_t regions,
                     std::size_t budget = kDefaultEnumerationBudget);

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = std::vector<std::uint32_t>;
        using difference_type = std::ptrdiff_t;
        using pointer = const value_type *;
        using reference = const value_type &;

        reference operator*() const { return column_; }
        pointer operator->() const { return &column_; }
        iterator &operator++();
        bool operator==(const iterator &other) const { return index_ == other.index_; }

    private:
        friend class ColumnEnumerator;
        iterator(std::size_t users, std::uint32_t regions, std::size_t index)
            : column_(users, 0), regions_(regions), index_(index) {}
        std::vector<std::uint32_t> column_;
        std::uint32_t regions_;
        std::size_t index_;
    };

    iterator begin() const;
    iterator end() const;
    std::size_t size() const noexcept { return count_; }

private:
    std::size_t users_;
    std::size_t regions_;
    std::size_t count_;
};

ColumnEnumerator enumerate_columns(std::size_t users, std::size_t regions,
                                   std::size_t budget = kDefaultEnumerationBudget);

// JSON round trip. The +inf top threshold is written as the string "inf".
nlohmann::json grid_to_json(const QuantizerGrid &grid);
QuantizerGrid grid_from_json(const nlohmann::json &j);

} // namespace qsched
