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

#include "qsched/config.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace qsched {

struct ExperimentOutcome {
    bool converged = false;
    nlohmann::json summary;
    std::vector<std::string> files; // written, relative to the output directory
};

// Runs one experiment and writes its artifacts into out_dir, which is created
// when missing. Nothing is written unless the run completes. Every log_every
// iterations (0 disables) a progress line goes to log when it is non-null.
ExperimentOutcome run_experiment(const ExperimentConfig &config, const std::filesystem::path &out_dir,
                                 std::size_t log_every = 0, std::ostream *log = nullptr);

// compare.csv: scheme,snr_db,avg_power_db,avg_rate_1..M
void write_compare_csv(std::ostream &os, const std::vector<SchemeResult> &rows, std::size_t users);

// sweep.csv: scheme,regions,avg_power_db,converged (RA3 rows, then the RA1 proxy)
void write_sweep_csv(std::ostream &os, const SweepResult &sweep, std::size_t fine_regions);

// overhead.csv: users,channels,regions,full_qcsi_bits,allocation_bits,per_channel_bits
void write_overhead_csv(std::ostream &os, const OverheadSpec &spec);

} // namespace qsched
