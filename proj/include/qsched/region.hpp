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

#include <limits>

namespace qsched {

// Quantization region [lower, upper) of an exponential gain with mean
// mean_gain. upper may be +infinity.
struct RegionContext {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    double mean_gain = 1.0;

    // Probability that the gain falls in the region.
    double probability() const;
};

} // namespace qsched
