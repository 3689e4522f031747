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

namespace qsched {

// Exponential integral E1(x) = int_x^inf e^{-t}/t dt, x > 0.
double expint_e1(double x);

// e^x * E1(x), x > 0. Finite and smooth for large x where E1 underflows.
double expint_e1_scaled(double x);

// Upper incomplete gamma Gamma(n+1, x) * e^x / n! for integer n >= 0,
// i.e. sum_{i=0}^{n} x^i / i!.
double truncated_exp_series(unsigned n, double x);

} // namespace qsched
