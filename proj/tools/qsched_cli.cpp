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
#include "qsched/experiment.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

namespace {

enum Exit : int {
    ok = 0,
    failure = 1,
    config_error = 2,
    not_converged = 3,
    numeric_error = 4,
};

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"qsched: channel scheduling and power allocation with quantized CSI"};
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
    std::size_t log_every = 0;
    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "overrides the config seed");
    app.add_flag("--dry-run", dry_run, "validate and print the resolved config");
    app.add_option("--log-every", log_every, "progress line every s iterations (0: quiet)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::config_error;
    }

    qsched::ExperimentConfig cfg;
    try {
        std::ifstream in(config_path);
        if (!in)
            throw qsched::ConfigError(fmt::format("cannot open config '{}'", config_path));
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception &e) {
            throw qsched::ConfigError(fmt::format("config '{}' is not valid JSON: {}", config_path, e.what()));
        }
        if (seed) {
            if (!j.is_object())
                throw qsched::ConfigError("config must be an object");
            j["seed"] = *seed;
        }
        cfg = qsched::parse_config(j);
    } catch (const qsched::ConfigError &e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return Exit::config_error;
    } catch (const qsched::BudgetError &e) {
        fmt::print(stderr, "enumeration budget exceeded: {}\n", e.what());
        return Exit::config_error;
    }

    if (dry_run) {
        std::cout << qsched::config_to_json(cfg).dump(2) << '\n';
        return Exit::ok;
    }

    try {
        const auto res = qsched::run_experiment(cfg, out_dir, log_every, &std::cerr);
        fmt::print("{}: {} -> {}\n", qsched::mode_name(cfg.mode), res.converged ? "converged" : "not converged",
                   out_dir);
        return res.converged ? Exit::ok : Exit::not_converged;
    } catch (const qsched::ConfigError &e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return Exit::config_error;
    } catch (const qsched::BudgetError &e) {
        fmt::print(stderr, "enumeration budget exceeded: {}\n", e.what());
        return Exit::config_error;
    } catch (const qsched::NumericError &e) {
        fmt::print(stderr, "numeric error: {} (residual {})\n", e.what(), e.residual());
        return Exit::numeric_error;
    } catch (const qsched::InfeasibleError &e) {
        fmt::print(stderr, "infeasible: {}\n", e.what());
        return Exit::numeric_error;
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return Exit::failure;
    }
}
