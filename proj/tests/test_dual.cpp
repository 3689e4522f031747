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

#include "qsched/errors.hpp"
#include "support.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

using namespace qsched;

namespace {

std::vector<double> random_lambda(std::size_t M, std::mt19937_64 &rng, double scale = 3.0)
{
    std::uniform_real_distribution<double> u(0.0, scale);
    std::vector<double> l(M);
    for (auto &x : l)
        x = u(rng);
    return l;
}

double dot_diff(const std::vector<double> &g, const std::vector<double> &a, const std::vector<double> &b)
{
    double s = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m)
        s += g[m] * (a[m] - b[m]);
    return s;
}

} // namespace

TEST_CASE("channel classes cover every channel")
{
    const Problem tc1 = testing::make_tc1();
    CHECK(tc1.classes() == 1);
    CHECK(tc1.class_multiplicity(0) == 16.0);

    const FadingModel fm = FadingModel::from_taps(3, 8, 4.0, {0.6, 0.4}, 1);
    const Problem rnd(PowerRateModel(OutageCapacity{}), build_random(fm, 3, 12.0, 4), {1, 1, 1}, {1, 1, 1});
    CHECK(rnd.classes() == 8);
    const auto &mult = rnd.multiplicities();
    CHECK(std::accumulate(mult.begin(), mult.end(), 0.0) == 8.0);
    for (std::size_t k = 0; k < 8; ++k)
        CHECK(rnd.class_of(k) < rnd.classes());
}

TEST_CASE("smoothed dual sits between the hard dual and the hard dual plus K eps")
{
    std::mt19937_64 rng(11);
    const Problem p = testing::make_small(3, 4, 4, {2.0, 3.0, 4.0});
    for (int trial = 0; trial < 20; ++trial) {
        const auto lam = random_lambda(3, rng);
        for (double eps : {1e-3, 0.05, 0.3}) {
            const double hard = exact_dual(p, lam, ScheduleMode::hard, eps).value;
            const double smooth = exact_dual(p, lam, ScheduleMode::smooth, eps).value;
            CHECK(hard <= smooth + 1e-12);
            CHECK(smooth < hard + 4.0 * eps);
        }
    }
}

TEST_CASE("dual evaluation matches per-channel brute force")
{
    const FadingModel fm = FadingModel::per_user({1.5, 2.5, 4.0}, 3, 2);
    const Problem p(PowerRateModel(OutageCapacity{}), build_random(fm, 3, 8.0, 9), {1.0, 0.7, 1.3}, {1, 2, 3});
    const std::vector<double> lam{1.2, 0.4, 2.2};
    const Multipliers mult = p.multipliers(lam);
    for (auto mode : {ScheduleMode::hard, ScheduleMode::smooth}) {
        const DualEvaluation ev = exact_dual(p, lam, mode, 0.05);
        double value = std::inner_product(lam.begin(), lam.end(), p.targets().begin(), 0.0);
        std::vector<double> rate(3, 0.0);
        for (std::size_t k = 0; k < 3; ++k) {
            const ChannelCurves curves(p.model(), p.grid(), k);
            const ChannelSums s =
                testing::brute_force_channel(build_channel_table(curves, mult), mode, 0.05, kTieTolerance);
            value += s.value;
            for (std::size_t m = 0; m < 3; ++m)
                rate[m] += s.rate[m];
        }
        CHECK(ev.value == doctest::Approx(value).epsilon(1e-12));
        for (std::size_t m = 0; m < 3; ++m) {
            CHECK(ev.rate[m] == doctest::Approx(rate[m]).epsilon(1e-12));
            CHECK(ev.subgradient[m] == doctest::Approx(p.targets()[m] - rate[m]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("order-statistics hard dual equals enumeration")
{
    std::mt19937_64 rng(5);
    for (std::size_t M : {1u, 2u, 3u, 5u})
        for (std::size_t L : {1u, 2u, 4u, 6u}) {
            std::vector<double> targets(M, 1.5);
            const Problem p = testing::make_small(M, 2, L, targets);
            for (int trial = 0; trial < 5; ++trial) {
                const auto lam = random_lambda(M, rng);
                const DualEvaluation a = exact_dual(p, lam, ScheduleMode::hard, 0.05);
                const DualEvaluation b = hard_dual_sorted(p, lam);
                CAPTURE(M);
                CAPTURE(L);
                CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
                for (std::size_t m = 0; m < M; ++m) {
                    CHECK(a.rate[m] == doctest::Approx(b.rate[m]).epsilon(1e-12).scale(1.0));
                    CHECK(a.power[m] == doctest::Approx(b.power[m]).epsilon(1e-12).scale(1.0));
                }
            }
        }
}

TEST_CASE("zero multipliers allocate nothing")
{
    const Problem p = testing::make_tc1();
    const std::vector<double> zero(4, 0.0);
    for (auto mode : {ScheduleMode::hard, ScheduleMode::smooth}) {
        const DualEvaluation ev = exact_dual(p, zero, mode, 0.05);
        CHECK(ev.value == 0.0);
        CHECK(ev.subgradient == p.targets());
        CHECK(ev.weighted_power == 0.0);
    }
    CHECK(hard_dual_sorted(p, zero).subgradient == p.targets());
}

TEST_CASE("hard dual is concave with its subgradient as supergradient")
{
    std::mt19937_64 rng(21);
    const Problem p = testing::make_small(3, 3, 4, {2.0, 2.5, 3.0});
    for (int trial = 0; trial < 40; ++trial) {
        const auto a = random_lambda(3, rng), b = random_lambda(3, rng);
        const DualEvaluation ea = exact_dual(p, a, ScheduleMode::hard, 0.05);
        const DualEvaluation eb = exact_dual(p, b, ScheduleMode::hard, 0.05);
        CHECK(eb.value <= ea.value + dot_diff(ea.subgradient, b, a) + 1e-10);
        std::vector<double> mid(3);
        for (std::size_t m = 0; m < 3; ++m)
            mid[m] = 0.5 * (a[m] + b[m]);
        const double em = exact_dual(p, mid, ScheduleMode::hard, 0.05).value;
        CHECK(em >= 0.5 * (ea.value + eb.value) - 1e-10);
    }
}

TEST_CASE("smoothed gradient Jacobian is negative semidefinite")
{
    std::mt19937_64 rng(3);
    const Problem p = testing::make_small(3, 2, 4, {2.0, 2.5, 3.0});
    for (int trial = 0; trial < 5; ++trial) {
        const auto lam = random_lambda(3, rng, 2.0);
        const JacobianReport rep = jacobian_check(p, lam, 0.05);
        CHECK(rep.sym_eigenvalues.maxCoeff() <= 1e-6);
        CHECK(rep.sym_eigenvalues.minCoeff() < 0.0);
    }
}

TEST_CASE("stochastic subgradient is an unbiased estimate of the smoothed gradient")
{
    const std::size_t M = 3, K = 4;
    const FadingModel fm = FadingModel::per_user({2.0, 2.7, 3.4}, K, 7);
    const Problem p(PowerRateModel(OutageCapacity{}), build_equiprobable(fm, 4), {1, 1, 1}, {2.0, 3.0, 4.0});
    const std::vector<double> lam{1.1, 1.6, 2.3};
    const DualEvaluation exact = exact_dual(p, lam, ScheduleMode::smooth, 0.05);

    const std::size_t N = 20000;
    std::vector<double> sum(M, 0.0), sq(M, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        const auto qcsi = quantize(p.grid(), sample_gains(fm, n));
        const auto g = stochastic_subgradient(p, lam, qcsi, 0.05);
        for (std::size_t m = 0; m < M; ++m) {
            sum[m] += g[m];
            sq[m] += g[m] * g[m];
        }
    }
    for (std::size_t m = 0; m < M; ++m) {
        const double mean = sum[m] / N;
        const double sd = std::sqrt((sq[m] / N - mean * mean) / N);
        CAPTURE(m);
        CHECK(std::abs(mean - exact.subgradient[m]) < 3.0 * sd);
    }
}

TEST_CASE("enumeration budget is enforced")
{
    const FadingModel fm = FadingModel::uniform(4, 2, 2.0, 1);
    const Problem p(PowerRateModel(OutageCapacity{}), build_equiprobable(fm, 8), {1, 1, 1, 1}, {1, 1, 1, 1}, 100);
    const std::vector<double> lam(4, 1.0);
    CHECK_THROWS_AS(exact_dual(p, lam, ScheduleMode::hard, 0.05), BudgetError);
    CHECK_NOTHROW(hard_dual_sorted(p, lam));
}
