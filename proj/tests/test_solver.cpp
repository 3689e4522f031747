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
#include <sstream>

#include <doctest.h>

using namespace qsched;

namespace {

// One user, one channel, two equiprobable regions at 0 dB. Only the upper
// region (floor ln 2) carries rate.
Problem single_user(double target)
{
    const FadingModel fm = FadingModel::uniform(1, 1, 1.0, 1);
    return Problem(PowerRateModel(OutageCapacity{}), build_equiprobable(fm, 2), {1.0}, {target});
}

double single_user_reference(double target)
{
    return testing::bisection_lambda(target, 0.5, std::log(2.0), 1.0, 12.0);
}

} // namespace

TEST_CASE("single-user smooth iteration converges to the bisection root")
{
    for (double target : {0.5, 2.0, 3.5}) {
        const double ref = single_user_reference(target);
        SolverConfig cfg;
        // d(rate)/d(lambda) = 1 / (2 lambda ln 2) at the root
        cfg.step = 1.5 * ref * std::log(2.0);
        cfg.tol = {1e-9};
        cfg.max_iters = 10000;
        const SolveResult r = run_offline_smooth(single_user(target), cfg);
        CAPTURE(target);
        REQUIRE(r.converged);
        CHECK(r.lambda[0] == doctest::Approx(ref).epsilon(1e-6));
        CHECK(r.final_eval.rate[0] == doctest::Approx(target).epsilon(1e-8));
    }
}

TEST_CASE("single-user subgradient iteration reaches the same multiplier")
{
    SolverConfig cfg;
    cfg.nonsmooth_kappa = 10.0;
    cfg.max_iters = 4000;
    for (auto ev : {HardEvaluator::enumerate, HardEvaluator::sorted}) {
        cfg.hard_evaluator = ev;
        const SolveResult r = run_offline_nonsmooth(single_user(2.0), cfg);
        CHECK(r.lambda[0] == doctest::Approx(single_user_reference(2.0)).epsilon(1e-3));
        CHECK(r.converged);
    }
}

TEST_CASE("zero targets keep their multipliers at zero")
{
    const Problem p = testing::make_small(2, 2, 3, {0.0, 2.0});
    SolverConfig cfg;
    cfg.init = {0.0, 0.5};
    cfg.step = 0.05;
    cfg.max_iters = 3000;
    const SolveResult r = run_offline_smooth(p, cfg);
    CHECK(r.converged);
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
        CHECK(r.trajectory.lambda_at(i)[0] == 0.0);
        CHECK(r.trajectory.lambda_at(i)[1] >= 0.0);
    }
    CHECK(r.final_eval.rate[0] == 0.0);
}

TEST_CASE("multipliers stay non-negative under every update rule")
{
    const Problem p = testing::make_small(3, 2, 3, {0.5, 1.0, 1.5});
    SolverConfig cfg;
    cfg.init = {5.0, 0.0, 5.0};
    cfg.step = 0.5;
    cfg.nonsmooth_kappa = 0.5;
    cfg.max_iters = 200;
    const FadingModel fm = FadingModel::per_user({2.0, 2.7, 3.4}, 2, 7);
    for (const SolveResult &r :
         {run_offline_smooth(p, cfg), run_offline_nonsmooth(p, cfg), run_online(p, fm, cfg, 200)})
        for (double l : r.trajectory.lambda)
            CHECK(l >= 0.0);
}

TEST_CASE("TC1 smooth iteration meets the targets")
{
    const Problem p = testing::make_tc1();
    SolverConfig cfg;
    cfg.step = 5e-3;
    const SolveResult r = run_offline_smooth(p, cfg);
    REQUIRE(r.converged);
    for (std::size_t m = 0; m < 4; ++m)
        CHECK(std::abs(r.final_eval.rate[m] - p.targets()[m]) < 1e-3);
    // lambda ordered like the targets on statistically identical users
    for (std::size_t m = 1; m < 4; ++m)
        CHECK(r.lambda[m] > r.lambda[m - 1]);
}

TEST_CASE("online iteration with one region replays the offline iteration")
{
    for (const auto &model : {PowerRateModel(ErgodicCapacity{}), PowerRateModel(MaxAvgBer{})}) {
        const FadingModel fm = FadingModel::per_user({1.5, 3.0}, 3, 4);
        const Problem p(model, build_equiprobable(fm, 1), {1.0, 1.2}, {1.0, 2.0});
        SolverConfig cfg;
        cfg.step = 0.05;
        cfg.tol = {1e-300, 1e-300};
        cfg.max_iters = 99;
        const SolveResult off = run_offline_smooth(p, cfg);
        const SolveResult on = run_online(p, fm, cfg, 100);
        REQUIRE(off.trajectory.size() == 100);
        REQUIRE(on.trajectory.size() == 100);
        for (std::size_t i = 0; i < 100; ++i)
            for (std::size_t m = 0; m < 2; ++m)
                CHECK(on.trajectory.lambda_at(i)[m] == doctest::Approx(off.trajectory.lambda_at(i)[m]).epsilon(1e-13));
    }
}

TEST_CASE("online runs are reproducible per seed")
{
    const Problem p = testing::make_small(2, 3, 4, {1.0, 2.0});
    SolverConfig cfg;
    cfg.step = 0.01;
    const auto run = [&](std::uint64_t seed) {
        return run_online(p, FadingModel::per_user({2.0, 2.7}, 3, seed), cfg, 500).lambda;
    };
    CHECK(run(3) == run(3));
    CHECK(run(3) != run(4));
}

TEST_CASE("online sample averages approach the targets")
{
    const Problem p = testing::make_tc1();
    const FadingModel fm = FadingModel::uniform(4, 16, snr_db_to_gain(6.0), 1);
    SolverConfig cfg;
    cfg.step = 2e-3;
    const SolveResult r = run_online(p, fm, cfg, 10000);
    CHECK(r.converged);
    for (std::size_t m = 0; m < 4; ++m)
        CHECK(std::abs(r.final_eval.rate[m] - p.targets()[m]) < 0.05 * p.targets()[m]);
}

TEST_CASE("trajectory CSV layout")
{
    Trajectory t;
    t.users = 2;
    t.push(0, std::vector<double>{0.1, 0.2}, std::vector<double>{1.0, -1.0}, std::vector<double>{0.5, 0.25}, 2.0,
           -1.0);
    t.push(5, std::vector<double>{0.3, 0.0}, std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}, 3.0,
           -2.0);
    std::ostringstream os;
    write_trajectory_csv(os, t);
    CHECK(os.str() == "iter,lambda_1,lambda_2,subgrad_1,subgrad_2,rate_1,rate_2,power\n"
                      "0,0.10000000000000001,0.20000000000000001,1,-1,0.5,0.25,2\n"
                      "5,0.29999999999999999,0,0,0,1,1,3\n");
}

TEST_CASE("trailing lambda variation")
{
    Trajectory t;
    t.users = 1;
    for (std::size_t i = 0; i <= 100; ++i) {
        const double l = i < 90 ? 5.0 : (i % 2 ? 1.01 : 0.99);
        t.push(i, std::vector<double>{l}, std::vector<double>{0.0}, std::vector<double>{0.0}, 0.0, 0.0);
    }
    // iterations 90..100: six at 0.99, five at 1.01
    const double mean = (6 * 0.99 + 5 * 1.01) / 11.0;
    CHECK(trailing_lambda_variation(t, 0.1) == doctest::Approx(0.02 / mean).epsilon(1e-9));
    CHECK(trailing_lambda_variation(t, 0.5) > 0.5);
}

TEST_CASE("solver configuration is validated")
{
    SolverConfig cfg;
    cfg.finalize(3);
    CHECK(cfg.init == std::vector<double>(3, 0.1));
    CHECK(cfg.tol == std::vector<double>(3, 1e-3));
    const auto bad = [](auto mutate) {
        SolverConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.finalize(2), ConfigError);
    };
    bad([](SolverConfig &c) { c.step = 0.0; });
    bad([](SolverConfig &c) { c.init = {1.0}; });
    bad([](SolverConfig &c) { c.init = {1.0, -1.0}; });
    bad([](SolverConfig &c) { c.tol = {1e-3, 0.0}; });
    bad([](SolverConfig &c) { c.nonsmooth_exponent = 1.5; });
    bad([](SolverConfig &c) { c.eps = 0.0; });
    bad([](SolverConfig &c) { c.max_iters = 0; });
    bad([](SolverConfig &c) { c.record_every = 0; });
    bad([](SolverConfig &c) { c.online_rate_tol = 0.0; });
}

TEST_CASE("non-finite duals raise a numeric error")
{
    const Problem p = testing::make_small(1, 1, 2, {1.0});
    SolverConfig cfg;
    cfg.init = {1e308};
    cfg.step = 1e308;
    cfg.max_iters = 3;
    CHECK_THROWS_AS(run_offline_smooth(p, cfg), NumericError);
}
