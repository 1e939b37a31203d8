/*
 * Copyright (C) 2026 The capire authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "capire/config.h"

#include "capire/error.h"
#include "capire/table_io.h"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <thread>

namespace capire
{

namespace
{

int to_int(const std::string& value, const std::string& key)
{
    auto v = parse_int(value, key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw InputError(key + " out of range");
    }
    return static_cast<int>(v);
}

std::uint64_t to_seed(const std::string& value, const std::string& key)
{
    auto v = parse_int(value, key);
    if (v < 0) {
        throw InputError(key + " must be >= 0");
    }
    return static_cast<std::uint64_t>(v);
}

} // namespace

std::vector<PolicyScenario> parse_scenario_list(std::string_view text)
{
    auto t = trim(text);
    if (t == "all") {
        return enumerate_factorial();
    }
    std::string spaced = t;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::vector<PolicyScenario> out;
    for (const auto& tok : split(spaced, ' ')) {
        if (tok.empty()) {
            continue;
        }
        auto s = parse_scenario_id(tok);
        if (std::find(out.begin(), out.end(), s) != out.end()) {
            throw InputError("scenario " + tok + " listed twice");
        }
        out.push_back(s);
    }
    if (out.empty()) {
        throw InputError("empty scenario list");
    }
    // canonical factorial order keeps outputs independent of how the list was written
    std::vector<PolicyScenario> ordered;
    for (const auto& s : enumerate_factorial()) {
        if (std::find(out.begin(), out.end(), s) != out.end()) {
            ordered.push_back(s);
        }
    }
    return ordered;
}

ExperimentConfig parse_config(const std::map<std::string, std::string>& kv, const std::filesystem::path& base_dir)
{
    ExperimentConfig c;
    auto& in      = c.inputs;
    auto resolve  = [&](const std::string& v) {
        std::filesystem::path p(v);
        return p.is_absolute() ? p : (base_dir / p).lexically_normal();
    };
    in.courses       = resolve("courses.csv");
    in.edges         = resolve("edges.csv");
    in.redesign      = resolve("redesign_a1.csv");
    in.reassign      = resolve("reassign.csv");
    in.archetypes    = resolve("archetypes.csv");
    in.engine_params = resolve("engine_params.csv");
    in.course_pass   = resolve("course_pass.csv");
    in.policy_params = resolve("policy_params.csv");
    in.targets       = resolve("targets.csv");
    in.bounds        = resolve("bounds.csv");

    for (const auto& [key, value] : kv) {
        if (key == "seed") {
            c.seed = to_seed(value, key);
        }
        else if (key == "n_students") {
            c.n_students = to_int(value, key);
        }
        else if (key == "replications") {
            c.replications = to_int(value, key);
        }
        else if (key == "scenarios") {
            c.scenarios = parse_scenario_list(value);
        }
        else if (key == "horizon") {
            c.horizon = to_int(value, key);
        }
        else if (key == "plan_length") {
            c.plan_length = to_int(value, key);
        }
        else if (key == "bottleneck_min_in_degree") {
            c.bottleneck.min_in_degree = to_int(value, key);
        }
        else if (key == "bottleneck_quantile") {
            c.bottleneck.betweenness_quantile = parse_double(value, key);
        }
        else if (key == "snapshot_semester") {
            c.snapshot_semester = to_int(value, key);
        }
        else if (key == "compress") {
            c.compress = parse_bool(value, key);
        }
        else if (key == "workers") {
            c.workers = to_int(value, key);
        }
        else if (key == "out") {
            c.out_dir          = resolve(value);
            c.out_dir_explicit = true;
        }
        else if (key == "courses") {
            in.courses = resolve(value);
        }
        else if (key == "edges") {
            in.edges = resolve(value);
        }
        else if (key == "redesign") {
            in.redesign = resolve(value);
        }
        else if (key == "reassign") {
            in.reassign = value.empty() ? std::filesystem::path{} : resolve(value);
        }
        else if (key == "archetypes") {
            in.archetypes = resolve(value);
        }
        else if (key == "engine_params") {
            in.engine_params = resolve(value);
        }
        else if (key == "course_pass") {
            in.course_pass = resolve(value);
        }
        else if (key == "policy_params") {
            in.policy_params = resolve(value);
        }
        else if (key == "targets") {
            in.targets = resolve(value);
        }
        else if (key == "bounds") {
            in.bounds = resolve(value);
        }
        else if (key == "calibration_budget") {
            c.calibration.budget = to_int(value, key);
        }
        else if (key == "calibration_n_students") {
            c.calibration.n_students = to_int(value, key);
        }
        else if (key == "calibration_replications") {
            c.calibration.replications = to_int(value, key);
        }
        else if (key == "calibration_seed") {
            c.calibration.seed = to_seed(value, key);
        }
        else if (key == "calibration_noise_repeats") {
            c.calibration.noise_repeats = to_int(value, key);
        }
        else {
            throw InputError("unknown config key '" + key + "'");
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    auto c = parse_config(read_key_values(path), path.parent_path());
    validate(c);
    return c;
}

void apply_overrides(ExperimentConfig& c, const ConfigOverrides& o)
{
    if (o.scenarios) {
        c.scenarios = parse_scenario_list(*o.scenarios);
    }
    if (o.replications) {
        c.replications = *o.replications;
    }
    if (o.n_students) {
        c.n_students = *o.n_students;
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.workers) {
        c.workers = *o.workers;
    }
    if (o.out_dir) {
        c.out_dir          = *o.out_dir;
        c.out_dir_explicit = true;
    }
    else if (!c.out_dir_explicit) {
        if (const char* env = std::getenv("CAPIRE_OUT"); env && *env) {
            c.out_dir = env;
        }
    }
    validate(c);
}

void validate(const ExperimentConfig& c)
{
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw InputError("config: " + what);
        }
    };
    require(c.n_students >= 1, "n_students must be >= 1");
    require(c.replications >= 1, "replications must be >= 1");
    require(c.replications <= 999999, "replications must be < 10^6");
    require(!c.scenarios.empty(), "at least one scenario required");
    require(c.horizon >= 1 && c.horizon <= 64, "horizon must be in 1..64");
    require(c.plan_length >= 1, "plan_length must be >= 1");
    require(c.snapshot_semester >= 1 && c.snapshot_semester <= c.horizon, "snapshot_semester outside 1..horizon");
    require(c.workers >= 0, "workers must be >= 0");
    require(c.bottleneck.betweenness_quantile >= 0.0 && c.bottleneck.betweenness_quantile <= 1.0,
            "bottleneck_quantile outside [0,1]");
    require(c.calibration.budget >= 1, "calibration_budget must be >= 1");
    require(c.calibration.n_students >= 1, "calibration_n_students must be >= 1");
    require(c.calibration.replications >= 1, "calibration_replications must be >= 1");
    require(c.calibration.noise_repeats >= 0, "calibration_noise_repeats must be >= 0");
}

int resolved_workers(const ExperimentConfig& c)
{
    if (c.workers > 0) {
        return c.workers;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig& c)
{
    std::string scenarios;
    for (const auto& s : c.scenarios) {
        scenarios += (scenarios.empty() ? "" : " ") + s.id();
    }
    const auto& in = c.inputs;
    return {
        {"seed", std::to_string(c.seed)},
        {"n_students", std::to_string(c.n_students)},
        {"replications", std::to_string(c.replications)},
        {"scenarios", scenarios},
        {"horizon", std::to_string(c.horizon)},
        {"plan_length", std::to_string(c.plan_length)},
        {"bottleneck_min_in_degree", std::to_string(c.bottleneck.min_in_degree)},
        {"bottleneck_quantile", format_double(c.bottleneck.betweenness_quantile)},
        {"snapshot_semester", std::to_string(c.snapshot_semester)},
        {"compress", c.compress ? "true" : "false"},
        {"workers", std::to_string(resolved_workers(c))},
        {"out", c.out_dir.string()},
        {"courses", in.courses.string()},
        {"edges", in.edges.string()},
        {"redesign", in.redesign.string()},
        {"reassign", in.reassign.string()},
        {"archetypes", in.archetypes.string()},
        {"engine_params", in.engine_params.string()},
        {"course_pass", in.course_pass.string()},
        {"policy_params", in.policy_params.string()},
        {"targets", in.targets.string()},
        {"bounds", in.bounds.string()},
        {"calibration_budget", std::to_string(c.calibration.budget)},
        {"calibration_n_students", std::to_string(c.calibration.n_students)},
        {"calibration_replications", std::to_string(c.calibration.replications)},
        {"calibration_seed", std::to_string(c.calibration.seed)},
        {"calibration_noise_repeats", std::to_string(c.calibration.noise_repeats)},
    };
}

} // namespace capire
