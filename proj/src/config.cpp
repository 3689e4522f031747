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

#include "qsched/config.hpp"
#include "qsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>

#include <fmt/core.h>

namespace qsched {

using nlohmann::json;

namespace {

constexpr std::uint64_t kRandomGridSalt = 0x5eedULL;

// Strict view of one JSON object: every key must be listed.
class Section {
public:
    Section(const json &j, std::string path, std::initializer_list<const char *> keys) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(fmt::format("{} must be an object", label()));
        for (const auto &[key, value] : j_.items()) {
            (void)value;
            if (std::none_of(keys.begin(), keys.end(), [&](const char *k) { return key == k; }))
                throw ConfigError(fmt::format("unknown key '{}'", at(key)));
        }
    }

    bool has(const char *key) const { return j_.contains(key); }
    const json &raw(const char *key) const { return j_.at(key); }
    std::string at(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    void number(const char *key, double &out) const
    {
        if (!has(key))
            return;
        const json &v = j_.at(key);
        if (!v.is_number())
            throw ConfigError(fmt::format("{} must be a number", at(key)));
        out = v.get<double>();
        if (!std::isfinite(out))
            throw ConfigError(fmt::format("{} must be finite", at(key)));
    }

    template <class U> void count(const char *key, U &out) const
    {
        if (!has(key))
            return;
        out = static_cast<U>(as_count(j_.at(key), at(key)));
    }

    void numbers(const char *key, std::vector<double> &out) const
    {
        if (!has(key))
            return;
        const json &v = j_.at(key);
        if (!v.is_array())
            throw ConfigError(fmt::format("{} must be an array of numbers", at(key)));
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                throw ConfigError(fmt::format("{}[{}] must be a number", at(key), i));
            out.push_back(v[i].get<double>());
            if (!std::isfinite(out.back()))
                throw ConfigError(fmt::format("{}[{}] must be finite", at(key), i));
        }
    }

    void counts(const char *key, std::vector<std::size_t> &out) const
    {
        if (!has(key))
            return;
        const json &v = j_.at(key);
        if (!v.is_array())
            throw ConfigError(fmt::format("{} must be an array of integers", at(key)));
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(static_cast<std::size_t>(as_count(v[i], fmt::format("{}[{}]", at(key), i))));
    }

    void string(const char *key, std::string &out) const
    {
        if (!has(key))
            return;
        const json &v = j_.at(key);
        if (!v.is_string())
            throw ConfigError(fmt::format("{} must be a string", at(key)));
        out = v.get<std::string>();
    }

private:
    static std::uint64_t as_count(const json &v, const std::string &where)
    {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ConfigError(fmt::format("{} must be a non-negative integer", where));
        return v.get<std::uint64_t>();
    }

    std::string label() const { return path_.empty() ? std::string("config") : path_; }

    const json &j_;
    std::string path_;
};

PowerRateModel parse_power_rate(const json &j)
{
    Section s(j, "power_rate", {"family", "params", "rate_cap", "root_tol", "max_iter"});
    std::string family = "outage_capacity";
    s.string("family", family);
    NumericSettings num;
    s.number("rate_cap", num.rate_cap);
    s.number("root_tol", num.root_tol);
    s.count("max_iter", num.max_iter);
    const json empty = json::object();
    const json &params = s.has("params") ? s.raw("params") : empty;

    if (family == "outage_capacity") {
        Section p(params, "power_rate.params", {"outage_delta"});
        OutageCapacity f;
        p.number("outage_delta", f.outage_delta);
        return PowerRateModel(f, num);
    }
    if (family == "ergodic_capacity") {
        Section p(params, "power_rate.params", {});
        return PowerRateModel(ErgodicCapacity{}, num);
    }
    if (family == "max_inst_ber") {
        Section p(params, "power_rate.params", {"kappa1", "kappa2", "ber_max"});
        MaxInstBer f;
        p.number("kappa1", f.kappa1);
        p.number("kappa2", f.kappa2);
        p.number("ber_max", f.ber_max);
        return PowerRateModel(f, num);
    }
    if (family == "max_avg_ber") {
        Section p(params, "power_rate.params", {"kappa1", "kappa2", "ber_avg"});
        MaxAvgBer f;
        p.number("kappa1", f.kappa1);
        p.number("kappa2", f.kappa2);
        p.number("ber_avg", f.ber_avg);
        return PowerRateModel(f, num);
    }
    throw ConfigError(fmt::format("power_rate.family '{}' is not one of outage_capacity, ergodic_capacity, "
                                  "max_inst_ber, max_avg_ber",
                                  family));
}

json power_rate_to_json(const PowerRateModel &m)
{
    json params = json::object();
    std::visit(
        [&](const auto &f) {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, OutageCapacity>) {
                params["outage_delta"] = f.outage_delta;
            } else if constexpr (std::is_same_v<F, MaxInstBer>) {
                params["kappa1"] = f.kappa1;
                params["kappa2"] = f.kappa2;
                params["ber_max"] = f.ber_max;
            } else if constexpr (std::is_same_v<F, MaxAvgBer>) {
                params["kappa1"] = f.kappa1;
                params["kappa2"] = f.kappa2;
                params["ber_avg"] = f.ber_avg;
            }
        },
        m.family());
    return {{"family", std::string(m.name())},
            {"params", params},
            {"rate_cap", m.numerics().rate_cap},
            {"root_tol", m.numerics().root_tol},
            {"max_iter", m.numerics().max_iter}};
}

Mode mode_from_name(const std::string &name)
{
    for (Mode m : {Mode::offline_smooth, Mode::offline_nonsmooth, Mode::online, Mode::compare, Mode::sweep_regions,
                   Mode::overhead})
        if (mode_name(m) == name)
            return m;
    throw ConfigError(fmt::format("mode '{}' is not one of offline_smooth, offline_nonsmooth, online, compare, "
                                  "sweep_regions, overhead",
                                  name));
}

std::string_view kind_name(QuantizerKind k)
{
    switch (k) {
    case QuantizerKind::equiprobable: return "equiprobable";
    case QuantizerKind::random: return "random";
    case QuantizerKind::custom: return "custom";
    }
    return "?";
}

void require_positive(std::span<const std::size_t> v, const char *what)
{
    if (v.empty())
        throw ConfigError(fmt::format("{} must not be empty", what));
    for (std::size_t x : v)
        if (x == 0)
            throw ConfigError(fmt::format("{} entries must be at least 1", what));
}

double mean_of(const Matrix<double> &m)
{
    double s = 0.0;
    for (double v : m.data())
        s += v;
    return s / static_cast<double>(m.data().size());
}

} // namespace

std::string_view mode_name(Mode m)
{
    switch (m) {
    case Mode::offline_smooth: return "offline_smooth";
    case Mode::offline_nonsmooth: return "offline_nonsmooth";
    case Mode::online: return "online";
    case Mode::compare: return "compare";
    case Mode::sweep_regions: return "sweep_regions";
    case Mode::overhead: return "overhead";
    }
    return "?";
}

ExperimentConfig parse_config(const json &j)
{
    Section top(j, "", {"mode", "seed", "users", "channels", "targets", "weights", "channel", "quantizer",
                        "power_rate", "solver", "compare", "sweep", "overhead"});
    ExperimentConfig c;
    if (!top.has("mode"))
        throw ConfigError("mode is required");
    std::string mode;
    top.string("mode", mode);
    c.mode = mode_from_name(mode);
    top.count("seed", c.seed);

    if (top.has("overhead")) {
        Section o(top.raw("overhead"), "overhead", {"users", "channels", "regions"});
        o.counts("users", c.overhead.users);
        o.counts("channels", c.overhead.channels);
        o.counts("regions", c.overhead.regions);
    }
    require_positive(c.overhead.users, "overhead.users");
    require_positive(c.overhead.channels, "overhead.channels");
    require_positive(c.overhead.regions, "overhead.regions");
    if (c.mode == Mode::overhead)
        return c;

    top.numbers("targets", c.targets);
    if (c.targets.empty())
        throw ConfigError("targets must list one rate per user");
    c.users = c.targets.size();
    if (top.has("users")) {
        std::size_t users = 0;
        top.count("users", users);
        if (users != c.targets.size())
            throw ConfigError(fmt::format("users is {} but targets has {} entries", users, c.targets.size()));
    }
    if (!top.has("channels"))
        throw ConfigError("channels is required");
    top.count("channels", c.channels);
    if (c.channels == 0)
        throw ConfigError("channels must be at least 1");
    for (double t : c.targets)
        if (t < 0.0)
            throw ConfigError("targets must be non-negative");
    c.weights.assign(c.users, 1.0);
    top.numbers("weights", c.weights);
    if (c.weights.size() != c.users)
        throw ConfigError(fmt::format("weights needs {} entries", c.users));
    for (double w : c.weights)
        if (!(w > 0.0))
            throw ConfigError("weights must be positive");

    if (top.has("channel")) {
        Section ch(top.raw("channel"), "channel", {"snr_db", "tap_powers"});
        ch.number("snr_db", c.channel.snr_db);
        ch.numbers("tap_powers", c.channel.tap_powers);
    }
    if (!c.channel.tap_powers.empty()) {
        double sum = 0.0;
        for (double t : c.channel.tap_powers) {
            if (t < 0.0)
                throw ConfigError("channel.tap_powers must be non-negative");
            sum += t;
        }
        if (!(sum > 0.0))
            throw ConfigError("channel.tap_powers must not sum to zero");
    }

    if (top.has("quantizer")) {
        Section q(top.raw("quantizer"), "quantizer", {"kind", "regions", "gain_max", "gain_max_rel", "thresholds"});
        std::string kind = "equiprobable";
        q.string("kind", kind);
        if (kind == "equiprobable")
            c.quantizer.kind = QuantizerKind::equiprobable;
        else if (kind == "random")
            c.quantizer.kind = QuantizerKind::random;
        else if (kind == "custom")
            c.quantizer.kind = QuantizerKind::custom;
        else
            throw ConfigError(fmt::format("quantizer.kind '{}' is not one of equiprobable, random, custom", kind));
        q.count("regions", c.quantizer.regions);
        q.number("gain_max", c.quantizer.gain_max);
        q.number("gain_max_rel", c.quantizer.gain_max_rel);
        q.numbers("thresholds", c.quantizer.thresholds);
        if (c.quantizer.kind == QuantizerKind::custom && !q.has("regions"))
            c.quantizer.regions = c.quantizer.thresholds.size() + 1;
    }
    if (c.quantizer.regions == 0)
        throw ConfigError("quantizer.regions must be at least 1");
    if (c.quantizer.gain_max < 0.0 || !(c.quantizer.gain_max_rel > 0.0))
        throw ConfigError("quantizer.gain_max must be non-negative and gain_max_rel positive");
    if (c.quantizer.kind == QuantizerKind::custom) {
        if (c.quantizer.thresholds.size() + 1 != c.quantizer.regions)
            throw ConfigError("quantizer.thresholds must hold regions - 1 interior thresholds");
    } else if (!c.quantizer.thresholds.empty()) {
        throw ConfigError("quantizer.thresholds is only valid with kind custom");
    }

    if (top.has("power_rate"))
        c.model = parse_power_rate(top.raw("power_rate"));

    if (top.has("solver")) {
        Section s(top.raw("solver"), "solver",
                  {"step", "nonsmooth_kappa", "nonsmooth_exponent", "init", "tol", "max_iters", "epsilon",
                   "record_every", "blocks", "enumeration_budget", "hard_evaluator", "online_rate_tol"});
        s.number("step", c.solver.step);
        s.number("nonsmooth_kappa", c.solver.nonsmooth_kappa);
        s.number("nonsmooth_exponent", c.solver.nonsmooth_exponent);
        s.numbers("init", c.solver.init);
        s.numbers("tol", c.solver.tol);
        s.count("max_iters", c.solver.max_iters);
        s.number("epsilon", c.solver.eps);
        s.count("record_every", c.solver.record_every);
        s.count("blocks", c.blocks);
        s.number("online_rate_tol", c.solver.online_rate_tol);
        s.count("enumeration_budget", c.enumeration_budget);
        std::string ev = "enumerate";
        s.string("hard_evaluator", ev);
        if (ev == "enumerate")
            c.solver.hard_evaluator = HardEvaluator::enumerate;
        else if (ev == "sorted")
            c.solver.hard_evaluator = HardEvaluator::sorted;
        else
            throw ConfigError(fmt::format("solver.hard_evaluator '{}' is not one of enumerate, sorted", ev));
    }
    c.solver.finalize(c.users);
    if (c.blocks == 0)
        throw ConfigError("solver.blocks must be at least 1");

    if (top.has("compare")) {
        Section s(top.raw("compare"), "compare",
                  {"snr_db", "schemes", "fine_regions", "reference_iters", "reference_kappa"});
        s.numbers("snr_db", c.compare.snr_db);
        if (s.has("schemes")) {
            const json &v = s.raw("schemes");
            if (!v.is_array())
                throw ConfigError("compare.schemes must be an array of names");
            c.compare.schemes.clear();
            for (const auto &e : v) {
                if (!e.is_string())
                    throw ConfigError("compare.schemes entries must be strings");
                c.compare.schemes.push_back(scheme_from_name(e.get<std::string>()));
            }
        }
        s.count("fine_regions", c.compare.fine_regions);
        s.count("reference_iters", c.compare.reference_iters);
        s.number("reference_kappa", c.compare.reference_kappa);
    }
    if (c.compare.snr_db.empty() || c.compare.schemes.empty())
        throw ConfigError("compare.snr_db and compare.schemes must not be empty");
    if (c.compare.fine_regions == 0 || c.compare.reference_iters == 0 || !(c.compare.reference_kappa > 0.0))
        throw ConfigError("compare.fine_regions, reference_iters and reference_kappa must be positive");

    if (top.has("sweep")) {
        Section s(top.raw("sweep"), "sweep", {"regions"});
        s.counts("regions", c.sweep.regions);
    }
    require_positive(c.sweep.regions, "sweep.regions");

    // enumeration feasibility is part of validation
    switch (c.mode) {
    case Mode::offline_smooth:
    case Mode::offline_nonsmooth:
        if (c.mode == Mode::offline_smooth || c.solver.hard_evaluator == HardEvaluator::enumerate)
            column_count(c.users, c.quantizer.regions, c.enumeration_budget);
        break;
    case Mode::compare:
        column_count(c.users, c.quantizer.regions, c.enumeration_budget);
        break;
    case Mode::sweep_regions:
        column_count(c.users, *std::max_element(c.sweep.regions.begin(), c.sweep.regions.end()),
                     c.enumeration_budget);
        break;
    default: break;
    }
    return c;
}

ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open config '{}'", path));
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path, e.what()));
    }
    return parse_config(j);
}

json config_to_json(const ExperimentConfig &c)
{
    json j;
    j["mode"] = std::string(mode_name(c.mode));
    j["seed"] = c.seed;
    j["overhead"] = {{"users", c.overhead.users}, {"channels", c.overhead.channels}, {"regions", c.overhead.regions}};
    if (c.mode == Mode::overhead)
        return j;
    j["users"] = c.users;
    j["channels"] = c.channels;
    j["targets"] = c.targets;
    j["weights"] = c.weights;
    j["channel"] = {{"snr_db", c.channel.snr_db}, {"tap_powers", c.channel.tap_powers}};
    json q = {{"kind", std::string(kind_name(c.quantizer.kind))},
              {"regions", c.quantizer.regions},
              {"gain_max", c.quantizer.gain_max},
              {"gain_max_rel", c.quantizer.gain_max_rel}};
    if (c.quantizer.kind == QuantizerKind::custom)
        q["thresholds"] = c.quantizer.thresholds;
    j["quantizer"] = q;
    j["power_rate"] = power_rate_to_json(c.model);
    j["solver"] = {{"step", c.solver.step},
                   {"nonsmooth_kappa", c.solver.nonsmooth_kappa},
                   {"nonsmooth_exponent", c.solver.nonsmooth_exponent},
                   {"init", c.solver.init},
                   {"tol", c.solver.tol},
                   {"max_iters", c.solver.max_iters},
                   {"epsilon", c.solver.eps},
                   {"record_every", c.solver.record_every},
                   {"blocks", c.blocks},
                   {"online_rate_tol", c.solver.online_rate_tol},
                   {"enumeration_budget", c.enumeration_budget},
                   {"hard_evaluator", c.solver.hard_evaluator == HardEvaluator::sorted ? "sorted" : "enumerate"}};
    json schemes = json::array();
    for (Scheme s : c.compare.schemes)
        schemes.push_back(std::string(scheme_name(s)));
    j["compare"] = {{"snr_db", c.compare.snr_db},
                    {"schemes", schemes},
                    {"fine_regions", c.compare.fine_regions},
                    {"reference_iters", c.compare.reference_iters},
                    {"reference_kappa", c.compare.reference_kappa}};
    j["sweep"] = {{"regions", c.sweep.regions}};
    return j;
}

FadingModel make_fading(const ExperimentConfig &c)
{
    const double snr = snr_db_to_gain(c.channel.snr_db);
    if (c.channel.tap_powers.empty())
        return FadingModel::uniform(c.users, c.channels, snr, c.seed);
    return FadingModel::from_taps(c.users, c.channels, snr, c.channel.tap_powers, c.seed);
}

QuantizerGrid make_grid(const ExperimentConfig &c, const FadingModel &fading)
{
    switch (c.quantizer.kind) {
    case QuantizerKind::equiprobable: return build_equiprobable(fading, c.quantizer.regions);
    case QuantizerKind::random: {
        const double gmax =
            c.quantizer.gain_max > 0.0 ? c.quantizer.gain_max : c.quantizer.gain_max_rel * mean_of(fading.mean_gains());
        return build_random(fading, c.quantizer.regions, gmax, c.seed ^ kRandomGridSalt);
    }
    case QuantizerKind::custom: return build_shared_ladder(fading, c.quantizer.thresholds);
    }
    throw ConfigError("unknown quantizer kind");
}

Problem build_problem(const ExperimentConfig &c)
{
    return Problem(c.model, make_grid(c, make_fading(c)), c.weights, c.targets, c.enumeration_budget);
}

SchemeSetup make_scheme_setup(const ExperimentConfig &c)
{
    SchemeSetup s;
    s.users = c.users;
    s.channels = c.channels;
    s.targets = c.targets;
    s.mu = c.weights;
    s.snr_db = c.channel.snr_db;
    s.tap_powers = c.channel.tap_powers;
    s.model = c.model;
    s.regions = c.quantizer.regions;
    s.random_gain_max_rel = c.quantizer.gain_max_rel;
    s.solver = c.solver;
    s.seed = c.seed;
    s.fine_regions = c.compare.fine_regions;
    s.reference_iters = c.compare.reference_iters;
    s.reference_kappa = c.compare.reference_kappa;
    s.enumeration_budget = c.enumeration_budget;
    return s;
}

} // namespace qsched
