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
#ifndef CAPIRE_POLICY_H
#define CAPIRE_POLICY_H

#include "capire/curriculum.h"
#include "capire/population.h"

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace capire
{

/// One cell of the 2x2x2 design: A curriculum redesign, B teaching support,
/// C psychosocial support.
struct PolicyScenario {
    bool a = false;
    bool b = false;
    bool c = false;

    /// Canonical "AxByCz" form.
    std::string id() const;

    bool operator==(const PolicyScenario&) const = default;
};

/// Accepts exactly "A{0|1}B{0|1}C{0|1}".
PolicyScenario parse_scenario_id(std::string_view text);

/// All eight scenarios, C varying fastest, then B, then A.
std::vector<PolicyScenario> enumerate_factorial();

/// Which courses receive the B1 pass boost.
struct TargetCourses {
    bool backbone = true;
    std::vector<std::string> ids; ///< used when `backbone` is false

    bool operator==(const TargetCourses&) const = default;
};

/// Numeric levers behind the factor levels (calibration inputs, not data).
struct PolicyParams {
    double b1_pass_logit_boost      = 0.8;
    double b1_conversion_multiplier = 1.5;
    double b1_friction_scale        = 0.5; ///< friction multiplier under B1, in [0, 1]
    double b1_stress_relief         = 0.04;
    double b1_belonging_gain        = 0.03;
    double c1_stress_relief         = 0.08;
    double c1_belonging_gain        = 0.06;
    double c1_vulnerable_multiplier = 2.0;
    TargetCourses b1_target;

    bool operator==(const PolicyParams&) const = default;
};

/// Throws InputError when a lever would lower pass or conversion probability or reliefs.
void validate(const PolicyParams& params);
PolicyParams parse_policy_params(const std::map<std::string, std::string>& kv);
PolicyParams load_policy_params(const std::filesystem::path& path);
std::map<std::string, std::string> to_key_values(const PolicyParams& params);

/// Modifiers a scenario induces, consumed by the engine.
struct PolicyEffects {
    PolicyScenario scenario;
    std::shared_ptr<const CurriculumGraph> graph;
    bool redesigned = false;
    std::vector<double> pass_logit_boost; ///< per course index
    double exam_conversion_multiplier = 1.0;
    double friction_scale             = 1.0;
    std::array<double, 2> stress_relief{}; ///< indexed by Group
    std::array<double, 2> belonging_gain{};

    double stress_relief_for(Group g) const
    {
        return stress_relief[static_cast<std::size_t>(g)];
    }
    double belonging_gain_for(Group g) const
    {
        return belonging_gain[static_cast<std::size_t>(g)];
    }
};

/// Resolve a scenario. `a1_graph` may be null unless the scenario has A1.
PolicyEffects effects(const PolicyScenario& scenario, const PolicyParams& params,
                      std::shared_ptr<const CurriculumGraph> base_graph,
                      std::shared_ptr<const CurriculumGraph> a1_graph);

} // namespace capire

#endif // CAPIRE_POLICY_H
