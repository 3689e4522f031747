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

#include "qsched/experiment.hpp"
#include "qsched/errors.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>

namespace qsched {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Artifact {
    std::string name;
    std::string body;
};

void attach_progress(SolverConfig &cfg, std::size_t every, std::ostream *log)
{
    if (!log || every == 0)
        return;
    cfg.progress_every = every;
    cfg.progress = [log](std::size_t it, std::span<const double> lambda, const DualEvaluation &ev) {
        fmt::print(*log, "iter {:>8}  lambda", it);
        for (double l : lambda)
            fmt::print(*log, " {:.6f}", l);
        fmt::print(*log, "  max|g| ");
        double g = 0.0;
        for (double s : ev.subgradient)
            g = std::max(g, std::abs(s));
        fmt::print(*log, "{:.3e}  power {:.6f}\n", g, ev.weighted_power);
    };
}

json solve_summary(const ExperimentConfig &c, const SolveResult &r)
{
    json s;
    s["converged"] = r.converged;
    s["termination"] = r.converged ? "converged" : "max_iters";
    s["iterations"] = r.iterations;
    s["lambda"] = r.lambda;
    s["rates"] = r.final_eval.rate;
    s["powers"] = r.final_eval.power;
    s["subgradient"] = r.final_eval.subgradient;
    s["weighted_power"] = r.final_eval.weighted_power;
    s["power_db"] = r.final_eval.weighted_power > 0.0 ? json(to_db(r.final_eval.weighted_power)) : json(nullptr);
    s["targets"] = c.targets;
    s["eps_prime"] = static_cast<double>(c.channels) * c.solver.eps;
    if (std::isfinite(r.final_eval.value))
        s["dual_value"] = r.final_eval.value;
    return s;
}

std::string trajectory_text(const Trajectory &t)
{
    std::ostringstream os;
    write_trajectory_csv(os, t);
    return os.str();
}

} // namespace

void write_compare_csv(std::ostream &os, const std::vector<SchemeResult> &rows, std::size_t users)
{
    os << "scheme,snr_db,avg_power_db";
    for (std::size_t m = 1; m <= users; ++m)
        fmt::print(os, ",avg_rate_{}", m);
    os << '\n';
    for (const auto &r : rows) {
        fmt::print(os, "{},{:.17g},{:.17g}", scheme_name(r.scheme), r.snr_db, r.power_db);
        for (std::size_t m = 0; m < users; ++m)
            fmt::print(os, ",{:.17g}", m < r.rate.size() ? r.rate[m] : std::nan(""));
        os << '\n';
    }
}

void write_sweep_csv(std::ostream &os, const SweepResult &sweep, std::size_t fine_regions)
{
    os << "scheme,regions,avg_power_db,converged\n";
    for (const auto &r : sweep.rows)
        fmt::print(os, "RA3,{},{:.17g},{}\n", r.regions, r.power_db, r.converged ? 1 : 0);
    fmt::print(os, "RA1,{},{:.17g},1\n", fine_regions, sweep.reference_db);
}

void write_overhead_csv(std::ostream &os, const OverheadSpec &spec)
{
    os << "users,channels,regions,full_qcsi_bits,allocation_bits,per_channel_bits\n";
    for (std::size_t M : spec.users)
        for (std::size_t K : spec.channels)
            for (std::size_t L : spec.regions) {
                const OverheadReport r = feedback_bits(M, K, L);
                fmt::print(os, "{},{},{},{},{},{}\n", M, K, L, r.full_qcsi_bits, r.allocation_bits,
                           r.per_channel_bits);
            }
}

ExperimentOutcome run_experiment(const ExperimentConfig &c, const fs::path &out_dir, std::size_t log_every,
                                 std::ostream *log)
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentOutcome out;
    std::vector<Artifact> files;
    json s;
    s["mode"] = std::string(mode_name(c.mode));
    s["seed"] = c.seed;
    s["kernel_isa"] = std::string(isa_name(active_isa()));

    switch (c.mode) {
    case Mode::offline_smooth:
    case Mode::offline_nonsmooth: {
        const Problem p = build_problem(c);
        SolverConfig cfg = c.solver;
        attach_progress(cfg, log_every, log);
        const bool smooth = c.mode == Mode::offline_smooth;
        const SolveResult r = smooth ? run_offline_smooth(p, cfg) : run_offline_nonsmooth(p, cfg);
        s.update(solve_summary(c, r));
        s["channel_classes"] = p.classes();
        if (!smooth) {
            s["lambda_variation"] = trailing_lambda_variation(r.trajectory, 0.1);
            s["best_lambda"] = r.best_lambda;
            s["best_dual_value"] = r.best_value;
        }
        out.converged = r.converged;
        files.push_back({"trajectory.csv", trajectory_text(r.trajectory)});
        break;
    }
    case Mode::online: {
        const FadingModel fading = make_fading(c);
        const Problem p(c.model, make_grid(c, fading), c.weights, c.targets, c.enumeration_budget);
        SolverConfig cfg = c.solver;
        attach_progress(cfg, log_every, log);
        const SolveResult r = run_online(p, fading, cfg, c.blocks);
        s.update(solve_summary(c, r));
        s["blocks"] = c.blocks;
        out.converged = r.converged;
        files.push_back({"trajectory.csv", trajectory_text(r.trajectory)});
        break;
    }
    case Mode::compare: {
        const SchemeSetup setup = make_scheme_setup(c);
        const auto rows = compare_schemes(setup, c.compare.snr_db, c.compare.schemes);
        json results = json::array();
        out.converged = true;
        for (const auto &r : rows) {
            if (log)
                fmt::print(*log, "{} at {} dB: {:.4f} dB ({})\n", scheme_name(r.scheme), r.snr_db, r.power_db,
                           r.status);
            results.push_back({{"scheme", std::string(scheme_name(r.scheme))},
                               {"snr_db", r.snr_db},
                               {"weighted_power", r.weighted_power},
                               {"power_db", std::isfinite(r.power_db) ? json(r.power_db) : json(nullptr)},
                               {"rates", r.rate},
                               {"ok", r.ok},
                               {"status", r.status}});
            out.converged = out.converged && r.ok;
        }
        s["converged"] = out.converged;
        s["results"] = results;
        s["eps_prime"] = static_cast<double>(c.channels) * c.solver.eps;
        std::ostringstream os;
        write_compare_csv(os, rows, c.users);
        files.push_back({"compare.csv", os.str()});
        break;
    }
    case Mode::sweep_regions: {
        const SweepResult sw = sweep_regions(make_scheme_setup(c), c.sweep.regions);
        json rows = json::array();
        out.converged = true;
        bool monotone = true;
        for (std::size_t i = 0; i < sw.rows.size(); ++i) {
            const auto &r = sw.rows[i];
            if (log)
                fmt::print(*log, "L = {}: {:.4f} dB{}\n", r.regions, r.power_db, r.converged ? "" : " (not converged)");
            rows.push_back({{"regions", r.regions}, {"power_db", r.power_db}, {"converged", r.converged}});
            out.converged = out.converged && r.converged;
            if (i > 0 && !(r.power_db < sw.rows[i - 1].power_db))
                monotone = false;
        }
        s["converged"] = out.converged;
        s["rows"] = rows;
        s["reference_regions"] = c.compare.fine_regions;
        s["reference_power_db"] = sw.reference_db;
        s["strictly_decreasing"] = monotone;
        std::ostringstream os;
        write_sweep_csv(os, sw, c.compare.fine_regions);
        files.push_back({"sweep.csv", os.str()});
        break;
    }
    case Mode::overhead: {
        std::ostringstream os;
        write_overhead_csv(os, c.overhead);
        files.push_back({"overhead.csv", os.str()});
        out.converged = true;
        s["converged"] = true;
        break;
    }
    }

    s["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    s["config"] = config_to_json(c);
    files.push_back({"summary.json", s.dump(2) + "\n"});

    fs::create_directories(out_dir);
    for (const auto &f : files) {
        std::ofstream os(out_dir / f.name, std::ios::binary | std::ios::trunc);
        os << f.body;
        if (!os)
            throw std::runtime_error(fmt::format("cannot write {}", (out_dir / f.name).string()));
        out.files.push_back(f.name);
    }
    out.summary = std::move(s);
    return out;
}

} // namespace qsched
