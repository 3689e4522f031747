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

#include "qsched/analysis.hpp"
#include "qsched/powerrate.hpp"
#include "qsched/quantizer.hpp"
#include "qsched/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qsched {

enum class Mode { offline_smooth, offline_nonsmooth, online, compare, sweep_regions, overhead };

std::string_view mode_name(Mode m);

enum class QuantizerKind { equiprobable, random, custom };

struct ChannelSpec {
    double snr_db = 6.0;
    std::vector<double> tap_powers; // empty: flat mean gain
};

struct QuantizerSpec {
    QuantizerKind kind = QuantizerKind::equiprobable;
    std::size_t regions = 4;
    double gain_max = 0.0;           // random kind; 0 means gain_max_rel times the mean gain
    double gain_max_rel = 3.0;
    std::vector<double> thresholds;  // custom kind: L-1 interior thresholds shared by all channels
};

struct CompareSpec {
    std::vector<double> snr_db{6.0};
    std::vector<Scheme> schemes{Scheme::RA1, Scheme::RA2, Scheme::RA3, Scheme::RA4, Scheme::RA5};
    std::size_t fine_regions = 256;
    std::size_t reference_iters = 20000;
    double reference_kappa = 1e-3;
};

struct SweepSpec {
    std::vector<std::size_t> regions{2, 3, 4, 6, 8};
};

struct OverheadSpec {
    std::vector<std::size_t> users{3};
    std::vector<std::size_t> channels{64};
    std::vector<std::size_t> regions{2, 4, 8};
};

struct ExperimentConfig {
    Mode mode = Mode::offline_smooth;
    std::uint64_t seed = 1;
    std::size_t users = 0;
    std::size_t channels = 0;
    std::vector<double> targets;
    std::vector<double> weights; // mu, default 1 per user
    ChannelSpec channel;
    QuantizerSpec quantizer;
    PowerRateModel model;
    SolverConfig solver;
    std::size_t blocks = 10000;
    std::size_t enumeration_budget = kDefaultEnumerationBudget;
    CompareSpec compare;
    SweepSpec sweep;
    OverheadSpec overhead;
};

// Parses and validates a config. Unknown keys, wrong types and out-of-range
// values raise ConfigError naming the offending path.
ExperimentConfig parse_config(const nlohmann::json &j);
ExperimentConfig load_config(const std::string &path);

// Fully resolved config, defaults included. parse_config(config_to_json(c))
// reproduces c.
nlohmann::json config_to_json(const ExperimentConfig &c);

FadingModel make_fading(const ExperimentConfig &c);
QuantizerGrid make_grid(const ExperimentConfig &c, const FadingModel &fading);
Problem build_problem(const ExperimentConfig &c);
SchemeSetup make_scheme_setup(const ExperimentConfig &c);

} // namespace qsched
