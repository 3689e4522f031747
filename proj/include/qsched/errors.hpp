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
#include <stdexcept>
#include <string>

namespace qsched {

// Invalid model parameters, malformed configuration or shape mismatches.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Root finding or series evaluation failed to reach the requested accuracy.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string &what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// L^M exceeds the configured enumeration budget.
class BudgetError : public std::length_error {
public:
    BudgetError(const std::string &what, double columns, std::size_t limit)
        : std::length_error(what), columns_(columns), limit_(limit) {}
    double columns() const noexcept { return columns_; }
    std::size_t limit() const noexcept { return limit_; }

private:
    double columns_;
    std::size_t limit_;
};

// The tie-sharing linear program has no feasible point.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string &what, double infeasibility)
        : std::runtime_error(what), infeasibility_(infeasibility) {}
    double infeasibility() const noexcept { return infeasibility_; }

private:
    double infeasibility_;
};

} // namespace qsched
