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
#ifndef CAPIRE_CONFIG_H
#define CAPIRE_CONFIG_H

#include "capire/curriculum.h"
#include "capire/policy.h"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace capire
{

struct InputPaths {
    std::filesystem::path courses;
    std::filesystem::path edges;
    std::filesystem::path redesign;
    std::filesystem::path reassign;
    std::filesystem::path archetypes;
    std::filesystem::path engine_params;
    std::filesystem::path course_pass;
    std::filesystem::path policy_params;
    std::filesystem::path targets;
    std::filesystem::path bounds;
};

struct CalibrationSettings {
    int budget          = 200;
    int n_students      = 300;
    int replications    = 10;
    std::uint64_t seed  = 11;
    int noise_repeats   = 0; ///< repeated evaluations of the start point before searching
};

struct ExperimentConfig {
    std::uint64_t seed = 20250101;
    int n_students     = 1343;
    int replications   = 100;
    std::vector<PolicyScenario> scenarios = enumerate_factorial();
    int horizon           = 12;
    int plan_length       = CurriculumGraph::default_plan_length;
    BottleneckRule bottleneck;
    int snapshot_semester = 8;
    bool compress         = true;
    int workers           = 0; ///< 0 means available hardware parallelism
    std::filesystem::path out_dir = "out";
    bool out_dir_explicit         = false; ///< set by file or flag
    InputPaths inputs;
    CalibrationSettings calibration;
};

/// Command-line overrides; unset fields keep the file or built-in value.
struct ConfigOverrides {
    std::optional<std::string> scenarios;
    std::optional<int> replications;
    std::optional<int> n_students;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
    std::optional<int> workers;
};

/// Scenario list: "all" or ids separated by commas or spaces.
std::vector<PolicyScenario> parse_scenario_list(std::string_view text);

/// Key-value config. Relative input paths resolve against `base_dir`.
/// Unknown keys are errors.
ExperimentConfig parse_config(const std::map<std::string, std::string>& kv, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Precedence: override, then file, then default. `CAPIRE_OUT` replaces the
/// default output directory when neither file nor flag sets one.
void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

void validate(const ExperimentConfig& config);

/// Every setting with its resolved value, in a fixed key order.
std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig& config);

/// Number of worker threads a config resolves to.
int resolved_workers(const ExperimentConfig& config);

} // namespace capire

#endif // CAPIRE_CONFIG_H
