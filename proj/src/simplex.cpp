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

#include "qsched/simplex.hpp"
#include "qsched/errors.hpp"

#include <cmath>
#include <limits>

#include <fmt/core.h>

namespace qsched {

namespace {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

    double &at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
    double &rhs(std::size_t r) { return at(r, cols_); }
    // objective row is stored at index rows_
    double &obj(std::size_t c) { return at(rows_, c); }

    void pivot(std::size_t pr, std::size_t pc)
    {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c)
            at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr)
                continue;
            const double f = at(r, pc);
            if (f == 0.0)
                continue;
            for (std::size_t c = 0; c <= cols_; ++c)
                at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> t_;
};

// Bland's rule iterations on columns [0, usable). Reduced costs are kept in
// the objective row as c_j - z_j; stops when none is negative.
LpStatus iterate(Tableau &T, std::vector<std::size_t> &basis, std::size_t usable, double tol,
                 std::size_t max_iter, std::size_t &iters)
{
    const std::size_t R = T.rows();
    while (iters < max_iter) {
        std::size_t pc = usable;
        for (std::size_t c = 0; c < usable; ++c)
            if (T.obj(c) < -tol) {
                pc = c;
                break;
            }
        if (pc == usable)
            return LpStatus::optimal;
        std::size_t pr = R;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < R; ++r) {
            const double a = T.at(r, pc);
            if (a > tol) {
                const double ratio = T.rhs(r) / a;
                if (ratio < best - tol || (std::abs(ratio - best) <= tol && pr < R && basis[r] < basis[pr])) {
                    best = ratio;
                    pr = r;
                }
            }
        }
        if (pr == R)
            return LpStatus::unbounded;
        T.pivot(pr, pc);
        basis[pr] = pc;
        ++iters;
    }
    return LpStatus::iteration_limit;
}

} // namespace

LpResult solve_lp(const LinearProgram &lp, double tol, std::size_t max_iter)
{
    const std::size_t m = lp.rows, n = lp.cols;
    if (lp.A.size() != m * n || lp.b.size() != m || lp.c.size() != n)
        throw ConfigError("linear program dimensions are inconsistent");

    // columns: n structural, then m artificial
    Tableau T(m, n + m);
    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r) {
        const double s = lp.b[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c)
            T.at(r, c) = s * lp.A[r * n + c];
        T.at(r, n + r) = 1.0;
        T.rhs(r) = s * lp.b[r];
        basis[r] = n + r;
    }
    // phase one: minimize the sum of artificials
    for (std::size_t c = 0; c <= n + m; ++c) {
        double z = 0.0;
        if (c < n || c == n + m)
            for (std::size_t r = 0; r < m; ++r)
                z += T.at(r, c);
        T.obj(c) = c < n ? -z : (c == n + m ? -z : 0.0);
    }

    LpResult res;
    LpStatus st = iterate(T, basis, n + m, tol, max_iter, res.iterations);
    if (st == LpStatus::iteration_limit) {
        res.status = st;
        return res;
    }
    res.infeasibility = -T.obj(n + m);
    double scale = 1.0;
    for (double v : lp.b)
        scale = std::max(scale, std::abs(v));
    if (res.infeasibility > tol * scale * static_cast<double>(std::max<std::size_t>(m, 1))) {
        res.status = LpStatus::infeasible;
        return res;
    }

    // drive artificials out of the basis; rows that cannot be pivoted are redundant
    std::vector<bool> dead(m, false);
    for (std::size_t r = 0; r < m; ++r) {
        if (basis[r] < n)
            continue;
        std::size_t pc = n;
        for (std::size_t c = 0; c < n; ++c)
            if (std::abs(T.at(r, c)) > tol) {
                pc = c;
                break;
            }
        if (pc == n) {
            dead[r] = true;
            continue;
        }
        T.pivot(r, pc);
        basis[r] = pc;
    }

    // phase two objective in reduced form
    for (std::size_t c = 0; c <= n + m; ++c)
        T.obj(c) = c < n ? lp.c[c] : 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        if (dead[r] || basis[r] >= n)
            continue;
        const double cb = lp.c[basis[r]];
        if (cb == 0.0)
            continue;
        for (std::size_t c = 0; c <= n + m; ++c)
            T.obj(c) -= cb * T.at(r, c);
    }
    // artificial columns are excluded from phase two
    st = iterate(T, basis, n, tol, max_iter, res.iterations);
    res.status = st;
    if (st != LpStatus::optimal)
        return res;

    res.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (!dead[r] && basis[r] < n)
            res.x[basis[r]] = std::max(0.0, T.rhs(r));
    res.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c)
        res.objective += lp.c[c] * res.x[c];
    return res;
}

} // namespace qsched
