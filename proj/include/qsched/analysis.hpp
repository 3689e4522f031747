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
#include "qsched/dual.hpp"
#include "qsched/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsched {

// Feedback needed per block.
struct OverheadReport {
    std::uint64_t full_qcsi_bits = 0;  // every user reports every channel: ceil(K M log2 L)
    std::uint64_t allocation_bits = 0; // per channel one of M*L (user, rate) pairs or idle: ceil(K log2(ML+1))
    std::uint64_t per_channel_bits = 0; // ceil(log2(ML+1))
};

OverheadReport feedback_bits(std::size_t users, std::size_t channels, std::size_t regions);

// Picks the user whose cumulative weight interval contains u in [0, 1).
// Returns nullopt (idle) when u falls beyond the total weight.
std::optional<std::size_t> realize_probabilistic_access(std::span<const double> weights, double u);

// Violation of the monotone winner structure on one channel.
struct ClusterViolation {
    int property = 0; // 1: own improvement, 2: others worsen, 3: loser stays loser
    std::size_t user = 0;
    std::vector<std::uint32_t> from;
    std::vector<std::uint32_t> to;
};

// Checks on every column j, with exact strict-unique-minimum winners:
//  1. if m wins at j it still wins when only its own region improves;
//  2. if m wins at j it still wins when another user's region worsens;
//  3. if m does not win at j it still does not when another user's region improves.
// Single-step moves suffice since each property composes.
std::vector<ClusterViolation> cluster_audit(const ChannelTable &table,
                                            std::size_t budget = kDefaultEnumerationBudget);

enum class Scheme { RA1, RA2, RA3, RA4, RA5 };

std::string_view scheme_name(Scheme s);
Scheme scheme_from_name(std::string_view name);

// Everything the comparison harness needs for one operating point.
struct SchemeSetup {
    std::size_t users = 3;
    std::size_t channels = 64;
    std::vector<double> targets;
    std::vector<double> mu;
    double snr_db = 6.0;
    std::vector<double> tap_powers;       // empty: flat mean gain snr_lin
    PowerRateModel model;
    std::size_t regions = 4;
    double random_gain_max_rel = 3.0;     // random quantizer range, multiple of the mean gain
    SolverConfig solver;
    std::uint64_t seed = 1;
    std::size_t fine_regions = 256;       // reference resolution for RA1
    std::size_t reference_iters = 20000;  // hard-dual iterations for RA1 and RA2
    double reference_kappa = 1e-3;
    std::size_t enumeration_budget = kDefaultEnumerationBudget;
};

struct SchemeResult {
    Scheme scheme = Scheme::RA3;
    double snr_db = 0.0;
    double weighted_power = 0.0;
    double power_db = 0.0;
    std::vector<double> rate;
    bool ok = false;
    std::string status;
};

FadingModel setup_fading(const SchemeSetup &s);

// RA1: maximized hard dual at fine_regions (order-statistics evaluator).
// RA2: tie LP over costs near the minimum, at refined and smooth multipliers.
// RA3: smooth policy, equiprobable quantizer.
// RA4: smooth policy, random quantizer.
// RA5: round-robin channels with constant on/off power per user.
SchemeResult run_scheme(Scheme scheme, const SchemeSetup &setup);

// Smooth multipliers for the equiprobable quantizer, shared by RA1-RA3.
SolveResult smooth_reference(const SchemeSetup &setup);

SchemeResult run_ra1(const SchemeSetup &setup, std::span<const double> start);
SchemeResult run_ra2(const SchemeSetup &setup, const SolveResult &smooth);
SchemeResult run_ra3(const SchemeSetup &setup, const SolveResult &smooth);
SchemeResult run_ra4(const SchemeSetup &setup);
SchemeResult run_ra5(const SchemeSetup &setup);

// All requested schemes at every SNR.
std::vector<SchemeResult> compare_schemes(const SchemeSetup &base, std::span<const double> snr_db,
                                          std::span<const Scheme> schemes);

struct SweepRow {
    std::size_t regions = 0;
    double power_db = 0.0;
    bool converged = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double reference_db = 0.0; // RA1 proxy at fine_regions
};

SweepResult sweep_regions(const SchemeSetup &base, std::span<const std::size_t> regions);

double to_db(double linear);

} // namespace qsched
