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

#include <cstddef>
#include <vector>

namespace qsched {

// minimize c^T x subject to A x = b, x >= 0. A is rows x cols, row-major.
struct LinearProgram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> A;
    std::vector<double> b;
    std::vector<double> c;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::iteration_limit;
    std::vector<double> x;
    double objective = 0.0;
    double infeasibility = 0.0; // phase-one optimum
    std::size_t iterations = 0;
};

// Dense two-phase tableau simplex with Bland's rule.
LpResult solve_lp(const LinearProgram &lp, double tol = 1e-9, std::size_t max_iter = 100000);

} // namespace qsched
